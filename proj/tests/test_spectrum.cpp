#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "atomcomb/fugacity.hpp"
#include "atomcomb/rng.hpp"
#include "atomcomb/spectrum.hpp"

using namespace atomcomb;

namespace {

// Temperature whose beta*hbar equals one second.
const double kUnitTauKelvin = kHbar / kBoltzmann;

ChemicalSpectrum manual_spectrum(std::vector<Complex> mus, double beta_hbar = 1.0) {
    std::sort(mus.begin(), mus.end(), [](const Complex& a, const Complex& b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
    ChemicalSpectrum s;
    s.mus = mus;
    s.source_roots.resize(mus.size());
    s.beta_hbar = beta_hbar;
    return s;
}

}  // namespace

TEST_CASE("polynomial constant term and positive coefficients") {
    const TrapConfig trap = TrapConfig::isotropic_hz(125.0);
    const CombPolynomial poly = build_polynomial(5000.0, 25e-9, trap, 300);
    CHECK(poly.evaluate(0.0) == -5000.0);
    CHECK(poly.coefficients[0] == -5000.0);
    for (std::size_t j = 1; j < poly.coefficients.size(); ++j) CHECK(poly.coefficients[j] > 0.0);
    CHECK(poly.degree() == 300);
    CHECK_FALSE(poly.trimmed);
}

TEST_CASE("degree-one polynomial and its root") {
    const TrapConfig trap = TrapConfig::isotropic_hz(125.0);
    const double t = kHbar * trap.omega_x / kBoltzmann;  // beta hbar omega = 1
    const CombPolynomial poly = build_polynomial(2.0, t, trap, 1);
    const double factor = 1.0 / -std::expm1(-1.0);
    const double coeff = factor * factor * factor - 1.0;
    CHECK(poly.coefficients[1] == doctest::Approx(coeff).epsilon(1e-13));
    const std::vector<Complex> roots = complex_roots(poly);
    REQUIRE(roots.size() == 1);
    CHECK(roots[0].real() == doctest::Approx(2.0 / coeff).epsilon(1e-13));
    CHECK(roots[0].real() == doctest::Approx(0.6759).epsilon(1e-4));
}

TEST_CASE("trailing underflowed coefficients are trimmed with a warning") {
    const TrapConfig trap = TrapConfig::isotropic_hz(125.0);
    // beta hbar omega = 40: a_j ~ 3 e^{-40 j} underflows past j = 18.
    const double t = kHbar * trap.omega_x / (40.0 * kBoltzmann);
    const CombPolynomial poly = build_polynomial(100.0, t, trap, 30);
    CHECK(poly.trimmed);
    CHECK(poly.degree() < 30);
    CHECK(poly.requested_degree == 30);
    CHECK(poly.coefficients.back() != 0.0);
}

TEST_CASE("polynomial evaluation equals the truncated series minus N") {
    const TrapConfig trap = TrapConfig::from_hz(125.0, 75.0, 25.0);
    const double t = 25e-9;
    const double beta = 1.0 / (kBoltzmann * t);
    const int m = 120;
    const CombPolynomial poly = build_polynomial(777.0, t, trap, m);
    CounterRng rng(13, 0);
    for (int i = 0; i < 10; ++i) {
        const double z = rng.uniform() * std::exp(beta * kHbar * trap.min_omega()) * 0.999;
        const double via_series = series_lhs(z, beta, trap, SeriesTruncation{m, 1e-30}).value - 777.0;
        CHECK(poly.evaluate(z) == doctest::Approx(via_series).epsilon(1e-11));
    }
}

TEST_CASE("comb polynomial roots: closure, uniqueness, residuals at degree 300") {
    const TrapConfig trap = TrapConfig::isotropic_hz(125.0);
    const CombPolynomial poly = build_polynomial(5000.0, 25e-9, trap, 300);
    const std::vector<Complex> roots = complex_roots(poly);
    REQUIRE(roots.size() == 300);

    int positive_real = 0;
    for (const Complex& z : roots) {
        bool has_conjugate = false;
        for (const Complex& w : roots)
            if (w == std::conj(z)) has_conjugate = true;
        CHECK(has_conjugate);
        if (z.imag() == 0.0 && z.real() > 0.0) ++positive_real;
    }
    CHECK(positive_real == 1);
}

TEST_CASE("positive real root matches the fugacity solver at j_max = M") {
    // Above the condensation point the root sits inside the series domain.
    const TrapConfig trap = TrapConfig::isotropic_hz(125.0);
    const double t = 100e-9;
    const int m = default_spectrum_degree(trap, t);
    const CombPolynomial poly = build_polynomial(5000.0, t, trap, m);
    const std::vector<Complex> roots = complex_roots(poly);

    double z_poly = 0.0;
    int count = 0;
    for (const Complex& z : roots)
        if (z.imag() == 0.0 && z.real() > 0.0) {
            z_poly = z.real();
            ++count;
        }
    REQUIRE(count == 1);
    const double beta_hbar = thermal_scales(t).tau;
    CHECK(z_poly < std::exp(beta_hbar * trap.min_omega()));

    const FugacitySolveResult solve = solve_fugacity(5000.0, t, trap, SeriesTruncation{m, 1e-30});
    CHECK(std::abs(z_poly - solve.z_star) / solve.z_star < 1e-8);
}

TEST_CASE("spectrum map: principal branch anchors") {
    const std::vector<Complex> roots{Complex(1.0, 0.0), Complex(0.0, 1.0), Complex(0.0, -1.0)};
    const ChemicalSpectrum spec = spectrum_from_roots(roots, kUnitTauKelvin);
    REQUIRE(spec.size() == 3);
    // Entries are sorted by real part; all three roots are unit modulus.
    for (const Complex& mu : spec.mus) CHECK(std::abs(mu.real()) < 1e-12);
    CHECK(spec.mus.front().imag() == doctest::Approx(-kPi / 2.0).epsilon(1e-12));
    CHECK(spec.mus.back().imag() == doctest::Approx(kPi / 2.0).epsilon(1e-12));
    double im_sum = 0.0;
    for (const Complex& mu : spec.mus) im_sum += mu.imag();
    CHECK(im_sum == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(spec.beta_hbar == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("spectrum map inverts the fugacity exponential") {
    const TrapConfig trap = TrapConfig::isotropic_hz(125.0);
    const double t = 25e-9;
    const CombPolynomial poly = build_polynomial(2000.0, t, trap, 150);
    const std::vector<Complex> roots = complex_roots(poly);
    const ChemicalSpectrum spec = spectrum_from_roots(roots, t);
    for (std::size_t k = 0; k < spec.size(); ++k) {
        const Complex back = std::exp(spec.beta_hbar * spec.mus[k]);
        CHECK(std::abs(back - spec.source_roots[k]) <= 1e-12 * std::abs(spec.source_roots[k]));
    }
    for (std::size_t k = 0; k + 1 < spec.size(); ++k) CHECK(spec.mus[k].real() <= spec.mus[k + 1].real());
}

TEST_CASE("spectrum map rejects the origin") {
    CHECK_THROWS_AS(spectrum_from_roots({Complex(0.0, 0.0)}, 25e-9), BranchError);
}

TEST_CASE("comb fit on an exact comb") {
    const double w = 321.5;
    const ChemicalSpectrum spec = manual_spectrum({{w, 0.0}, {2.0 * w, 0.0}, {3.0 * w, 0.0}});
    const CombFit fit = comb_fit(spec);
    CHECK(fit.omega_rep == doctest::Approx(w).epsilon(1e-13));
    CHECK(fit.omega_0 == 0.0);
    CHECK(fit.rms_residual <= 1e-10 * w);
    CHECK_FALSE(fit.not_a_comb);
    CHECK(fit.assignments == std::vector<long long>{1, 2, 3});
}

TEST_CASE("comb fit under one-percent jitter") {
    CounterRng rng(4242, 0);
    const double w = 77.0;
    std::vector<Complex> mus;
    for (int m = 1; m <= 40; ++m)
        mus.push_back(Complex(w * m * (1.0 + 0.01 * (2.0 * rng.uniform() - 1.0)), 0.0));
    const CombFit fit = comb_fit(manual_spectrum(std::move(mus)));
    CHECK(fit.omega_rep == doctest::Approx(w).epsilon(0.01));
}

TEST_CASE("comb fit needs three distinct values") {
    CHECK_THROWS_AS(comb_fit(manual_spectrum({{1.0, 0.0}, {2.0, 0.0}})), InsufficientDataError);
    CHECK_THROWS_AS(comb_fit(manual_spectrum({{1.0, 0.5}, {1.0, -0.5}, {1.0, 0.0}})), InsufficientDataError);
}

TEST_CASE("comb fit is scale equivariant") {
    CounterRng rng(808, 0);
    std::vector<Complex> mus;
    for (int m = 1; m <= 25; ++m)
        mus.push_back(Complex(3.25 * m * (1.0 + 0.005 * (2.0 * rng.uniform() - 1.0)), 0.0));
    const ChemicalSpectrum base = manual_spectrum(mus);
    const CombFit f1 = comb_fit(base);

    const double c = 17.0;
    std::vector<Complex> scaled;
    for (const Complex& mu : mus) scaled.push_back(c * mu);
    const CombFit f2 = comb_fit(manual_spectrum(std::move(scaled)));
    CHECK(f2.omega_rep == doctest::Approx(c * f1.omega_rep).epsilon(1e-12));
    CHECK(f1.assignments == f2.assignments);
}

TEST_CASE("comb fit flags dispersed spacings") {
    CounterRng rng(515, 0);
    std::vector<Complex> mus;
    double v = 1.0;
    for (int i = 0; i < 30; ++i) {
        v += 0.02 + rng.uniform();  // wildly uneven gaps
        mus.push_back(Complex(v, 0.0));
    }
    const CombFit fit = comb_fit(manual_spectrum(std::move(mus)));
    CHECK(fit.not_a_comb);
}
