#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "atomcomb/core.hpp"
#include "atomcomb/errors.hpp"
#include "atomcomb/fugacity.hpp"
#include "atomcomb/polyroots.hpp"

namespace atomcomb {

/// Truncated number-conservation series as a polynomial in the fugacity:
/// a_0 = -N, a_j = prod_l (1 - e^{-j beta hbar omega_l})^{-1} - 1.
struct CombPolynomial {
    std::vector<double> coefficients;  // ascending, a_0 .. a_M
    int requested_degree = 0;
    bool trimmed = false;  // trailing coefficients underflowed to zero

    int degree() const { return static_cast<int>(coefficients.size()) - 1; }

    double evaluate(double z) const {
        double p = coefficients.back();
        for (std::size_t i = coefficients.size() - 1; i-- > 0;) p = p * z + coefficients[i];
        return p;
    }
};

/// The M complex partial chemical potentials (rad/s), sorted ascending by
/// real part, together with the fugacity-plane roots they came from.
struct ChemicalSpectrum {
    std::vector<Complex> mus;
    std::vector<Complex> source_roots;
    double beta_hbar = 0.0;  // s

    std::size_t size() const { return mus.size(); }
    double omega(std::size_t k) const { return mus[k].real(); }
    double gamma(std::size_t k) const { return mus[k].imag(); }
};

struct CombFit {
    double omega_rep = 0.0;  // repetition frequency, rad/s
    double omega_0 = 0.0;    // offset, fixed 0
    std::vector<long long> assignments;  // m(k) per spectrum entry, sorted order
    double rms_residual = 0.0;           // rad/s
    bool not_a_comb = false;             // spacing dispersion > 50% of median
};

/// Number of lattice modes below the default 12 kB T cutoff, ground state
/// excluded, capped for polynomial conditioning.
inline int default_spectrum_degree(const TrapConfig& trap, double temperature_kelvin, int cap = 500) {
    const double cutoff = 12.0 * kBoltzmann * temperature_kelvin;
    const std::uint64_t n = mode_count_below(trap, cutoff, static_cast<std::uint64_t>(cap) + 1);
    return static_cast<int>(std::min<std::uint64_t>(n, static_cast<std::uint64_t>(cap)));
}

inline CombPolynomial build_polynomial(double n_atoms, double temperature_kelvin, const TrapConfig& trap,
                                       int degree) {
    if (degree < 1) throw DomainError("polynomial degree must be >= 1");
    if (!(n_atoms >= 1.0)) throw DomainError("atom number must be >= 1");
    const ThermalScales th = thermal_scales(temperature_kelvin);
    const double bh = th.tau;

    CombPolynomial poly;
    poly.requested_degree = degree;
    poly.coefficients.resize(static_cast<std::size_t>(degree) + 1);
    poly.coefficients[0] = -n_atoms;
    for (int j = 1; j <= degree; ++j) {
        double s = 0.0;
        for (double w : trap.axes()) s -= std::log1p(-std::exp(-static_cast<double>(j) * bh * w));
        poly.coefficients[static_cast<std::size_t>(j)] = std::expm1(s);
    }
    while (poly.coefficients.size() > 1 && poly.coefficients.back() == 0.0) {
        poly.coefficients.pop_back();
        poly.trimmed = true;
    }
    return poly;
}

/// All complex roots of the comb polynomial. Every root must pass the
/// backward-stable residual bound |P(z)| <= 1e-8 sum|a_j| max(1,|z|)^M and
/// the set is exactly conjugate-closed on return.
inline std::vector<Complex> complex_roots(const CombPolynomial& poly, int max_iterations = 600) {
    if (poly.degree() < 1) throw DomainError("polynomial degree must be >= 1 after trimming");
    PolyRootResult raw = find_polynomial_roots(poly.coefficients, max_iterations);
    symmetrize_conjugate_pairs(raw.roots);

    // One positive real root exists (single coefficient sign change); polish
    // it in real arithmetic so downstream fugacity comparisons are sharp.
    for (Complex& r : raw.roots) {
        if (r.imag() != 0.0 || r.real() <= 0.0) continue;
        double x = r.real();
        for (int i = 0; i < 60; ++i) {
            double p = poly.coefficients.back(), dp = 0.0;
            for (std::size_t j = poly.coefficients.size() - 1; j-- > 0;) {
                dp = dp * x + p;
                p = p * x + poly.coefficients[j];
            }
            if (dp == 0.0) break;
            const double step = p / dp;
            x -= step;
            if (std::abs(step) <= 4.0 * std::numeric_limits<double>::epsilon() * std::abs(x)) break;
        }
        r = Complex(x, 0.0);
    }

    double coeff_sum = 0.0;
    for (double c : poly.coefficients) coeff_sum += std::abs(c);
    const int deg = poly.degree();
    double worst = 0.0;
    for (const Complex& r : raw.roots) {
        const double res = std::abs(poly_detail::horner(poly.coefficients, r).p);
        const double bound = 1e-8 * coeff_sum * std::pow(std::max(1.0, std::abs(r)), deg);
        if (res > bound) worst = std::max(worst, res / bound);
    }
    if (worst > 0.0)
        throw ConvergenceError("root residual exceeds bound by factor " + std::to_string(worst) + " after " +
                               std::to_string(raw.iterations) + " iterations");
    return raw.roots;
}

/// Maps fugacity-plane roots to chemical potentials via the principal
/// logarithm, mu = ln(z)/(beta hbar), sorted ascending by real part.
inline ChemicalSpectrum spectrum_from_roots(const std::vector<Complex>& roots, double temperature_kelvin) {
    const ThermalScales th = thermal_scales(temperature_kelvin);
    ChemicalSpectrum spec;
    spec.beta_hbar = th.tau;
    std::vector<std::pair<Complex, Complex>> mapped;  // (mu, z)
    mapped.reserve(roots.size());
    for (const Complex& z : roots) {
        if (z == Complex(0.0, 0.0)) throw BranchError("root at the origin has no logarithm");
        const Complex mu(std::log(std::abs(z)) / th.tau, std::arg(z) / th.tau);
        mapped.emplace_back(mu, z);
    }
    std::sort(mapped.begin(), mapped.end(), [](const auto& a, const auto& b) {
        if (a.first.real() != b.first.real()) return a.first.real() < b.first.real();
        return a.first.imag() < b.first.imag();
    });
    spec.mus.reserve(mapped.size());
    spec.source_roots.reserve(mapped.size());
    for (const auto& [mu, z] : mapped) {
        spec.mus.push_back(mu);
        spec.source_roots.push_back(z);
    }
    return spec;
}

/// Fits the comb law Re mu_k = omega m(k) (offset fixed to zero): a robust
/// median-spacing estimate over the distinct sorted real parts, integer
/// assignments, then one least-squares refinement of omega.
inline CombFit comb_fit(const ChemicalSpectrum& spec) {
    std::vector<double> values;
    values.reserve(spec.size());
    for (const Complex& mu : spec.mus) values.push_back(mu.real());  // already sorted ascending

    std::vector<double> distinct;
    for (double v : values) {
        if (distinct.empty() || v - distinct.back() > 1e-12 * std::max(1.0, std::abs(v)))
            distinct.push_back(v);
    }
    if (distinct.size() < 3)
        throw InsufficientDataError("comb fit needs >= 3 distinct real parts, got " +
                                    std::to_string(distinct.size()));

    std::vector<double> gaps(distinct.size() - 1);
    for (std::size_t i = 0; i + 1 < distinct.size(); ++i) gaps[i] = distinct[i + 1] - distinct[i];
    std::vector<double> sorted_gaps = gaps;
    std::sort(sorted_gaps.begin(), sorted_gaps.end());
    const std::size_t h = sorted_gaps.size() / 2;
    const double median = (sorted_gaps.size() % 2 == 1)
                              ? sorted_gaps[h]
                              : 0.5 * (sorted_gaps[h - 1] + sorted_gaps[h]);

    double gap_mean = std::accumulate(gaps.begin(), gaps.end(), 0.0) / static_cast<double>(gaps.size());
    double gap_var = 0.0;
    for (double g : gaps) gap_var += (g - gap_mean) * (g - gap_mean);
    gap_var /= static_cast<double>(gaps.size());

    CombFit fit;
    fit.not_a_comb = std::sqrt(gap_var) > 0.5 * median;

    fit.assignments.reserve(values.size());
    double sum_mv = 0.0, sum_mm = 0.0;
    for (double v : values) {
        const long long m = std::llround(v / median);
        fit.assignments.push_back(m);
        sum_mv += static_cast<double>(m) * v;
        sum_mm += static_cast<double>(m) * static_cast<double>(m);
    }
    fit.omega_rep = (sum_mm > 0.0 && sum_mv > 0.0) ? sum_mv / sum_mm : median;
    fit.omega_0 = 0.0;

    double ss = 0.0;
    for (std::size_t k = 0; k < values.size(); ++k) {
        const double r = values[k] - fit.omega_rep * static_cast<double>(fit.assignments[k]);
        ss += r * r;
    }
    fit.rms_residual = std::sqrt(ss / static_cast<double>(values.size()));
    return fit;
}

}  // namespace atomcomb
