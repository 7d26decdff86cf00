#include <doctest.h>

#include <cmath>
#include <vector>

#include "atomcomb/analysis.hpp"
#include "atomcomb/rng.hpp"

using namespace atomcomb;

namespace {

// Regularized upper incomplete gamma Q(a, x); series and continued-fraction
// halves, used as the chi-squared p-value oracle.
double gammq(double a, double x) {
    if (x < 0.0 || a <= 0.0) return 0.0;
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) {
        double ap = a, del = 1.0 / a, sum = del;
        for (int i = 0; i < 500; ++i) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::abs(del) < std::abs(sum) * 1e-14) break;
        }
        return 1.0 - sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
    }
    double b = x + 1.0 - a, c = 1e300, d = 1.0 / b, h = d;
    for (int i = 1; i <= 500; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < 1e-300) d = 1e-300;
        c = b + an / c;
        if (std::abs(c) < 1e-300) c = 1e-300;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-14) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

}  // namespace

TEST_CASE("histogram over explicit edges") {
    const Histogram h = make_histogram({0.0, 1.0, 2.0, 3.0}, std::vector<double>{0.0, 2.0, 4.0});
    REQUIRE(h.counts.size() == 2);
    CHECK(h.counts[0] == 2);
    CHECK(h.counts[1] == 2);
    CHECK(h.total == 4);
}

TEST_CASE("histogram total equals the sample count for auto edges") {
    CounterRng rng(3, 3);
    std::vector<double> values;
    for (int i = 0; i < 5000; ++i) values.push_back(rng.normal());
    const Histogram h = make_histogram(values, static_cast<std::size_t>(40));
    CHECK(h.total == values.size());
    std::uint64_t sum = 0;
    for (auto c : h.counts) sum += c;
    CHECK(sum == h.total);
}

TEST_CASE("histogram rebinning conserves totals") {
    CounterRng rng(4, 0);
    std::vector<double> values;
    for (int i = 0; i < 2000; ++i) values.push_back(rng.uniform() * 10.0);
    const Histogram fine = make_histogram(values, static_cast<std::size_t>(64));
    // Merge adjacent pairs.
    std::vector<double> coarse_edges;
    for (std::size_t i = 0; i < fine.edges.size(); i += 2) coarse_edges.push_back(fine.edges[i]);
    if (coarse_edges.back() != fine.edges.back()) coarse_edges.push_back(fine.edges.back());
    const Histogram coarse = make_histogram(values, coarse_edges);
    CHECK(coarse.total == fine.total);
    for (std::size_t i = 0; i + 1 < coarse.counts.size(); ++i)
        CHECK(coarse.counts[i] == fine.counts[2 * i] + fine.counts[2 * i + 1]);
}

TEST_CASE("histogram degenerate range and empty input") {
    CHECK_THROWS_AS(make_histogram({2.0, 2.0, 2.0}, static_cast<std::size_t>(10)), DegenerateRangeError);
    CHECK_THROWS_AS(make_histogram({}, static_cast<std::size_t>(10)), InsufficientDataError);
}

TEST_CASE("histogram of normal draws passes a chi-squared test") {
    CounterRng rng(10, 0);
    const int n = 100000;
    std::vector<double> values;
    values.reserve(n);
    for (int i = 0; i < n; ++i) values.push_back(rng.normal());

    std::vector<double> edges;
    const int bins = 50;
    for (int i = 0; i <= bins; ++i) edges.push_back(-4.0 + 8.0 * i / bins);
    const Histogram h = make_histogram(values, edges);

    double chi2 = 0.0;
    int dof = 0;
    std::uint64_t covered = 0;
    for (std::size_t i = 0; i < h.counts.size(); ++i) {
        covered += h.counts[i];
        const double p = normal_cdf(h.edges[i + 1]) - normal_cdf(h.edges[i]);
        const double expected = p * n;
        if (expected < 5.0) continue;
        chi2 += (h.counts[i] - expected) * (h.counts[i] - expected) / expected;
        ++dof;
    }
    CHECK(covered >= static_cast<std::uint64_t>(n) - 20);  // essentially everything within +-4
    const double p_value = gammq(0.5 * (dof - 1), 0.5 * chi2);
    CHECK(p_value > 0.001);
}

TEST_CASE("envelope of a Gaussian histogram") {
    CounterRng rng(11, 0);
    std::vector<double> values;
    for (int i = 0; i < 1000000; ++i) values.push_back(2.5 + 0.7 * rng.normal());
    const Histogram h = make_histogram(values, static_cast<std::size_t>(60));
    const EnvelopeFit fit = envelope_fit(h);
    CHECK(std::abs(fit.skewness) < 0.05);
    CHECK(fit.center == doctest::Approx(2.5).epsilon(0.01));
    CHECK(fit.sigma == doctest::Approx(0.7).epsilon(0.02));
    CHECK(fit.goodness < 0.05);
}

TEST_CASE("envelope of a symmetric double exponential: flat-tailed but unskewed") {
    CounterRng rng(12, 0);
    std::vector<double> values;
    for (int i = 0; i < 1000000; ++i) {
        const double u = rng.uniform_open();
        const double mag = -std::log(u);
        values.push_back(rng.uniform() < 0.5 ? mag : -mag);
    }
    const Histogram h = make_histogram(values, static_cast<std::size_t>(60));
    const EnvelopeFit laplace = envelope_fit(h);
    CHECK(std::abs(laplace.skewness) < 0.05);

    CounterRng rng2(13, 0);
    std::vector<double> gauss;
    for (int i = 0; i < 1000000; ++i) gauss.push_back(rng2.normal());
    const EnvelopeFit normal = envelope_fit(make_histogram(gauss, static_cast<std::size_t>(60)));
    CHECK(laplace.goodness > normal.goodness);
}

TEST_CASE("envelope skewness negates under mirroring") {
    CounterRng rng(14, 0);
    std::vector<double> values, mirrored;
    for (int i = 0; i < 50000; ++i) {
        const double u = rng.uniform_open();
        const double x = -std::log(u);  // strongly right-skewed
        values.push_back(x);
        mirrored.push_back(-x);
    }
    const Histogram h = make_histogram(values, static_cast<std::size_t>(50));
    std::vector<double> neg_edges;
    for (auto it = h.edges.rbegin(); it != h.edges.rend(); ++it) neg_edges.push_back(-*it);
    const Histogram hm = make_histogram(mirrored, neg_edges);
    const EnvelopeFit a = envelope_fit(h);
    const EnvelopeFit b = envelope_fit(hm);
    CHECK(a.skewness > 0.5);
    CHECK(b.skewness == doctest::Approx(-a.skewness).epsilon(1e-9));
    CHECK(b.sigma == doctest::Approx(a.sigma).epsilon(1e-9));
}

TEST_CASE("envelope needs five non-empty bins") {
    const Histogram h = make_histogram({0.1, 1.1, 2.1, 3.1}, std::vector<double>{0, 1, 2, 3, 4});
    CHECK_THROWS_AS(envelope_fit(h), InsufficientDataError);
}

TEST_CASE("linear fit recovers exact lines") {
    const std::vector<double> x{0.0, 1.0, 2.0, 3.0, 4.0};
    const std::vector<double> y{1.0, 3.0, 5.0, 7.0, 9.0};
    const LinearFit fit = linear_fit(x, y);
    CHECK(fit.slope == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(fit.intercept == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(fit.r_squared == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("linear fit of constant data") {
    const std::vector<double> x{0.0, 1.0, 2.0, 3.0};
    const std::vector<double> y{5.0, 5.0, 5.0, 5.0};
    const LinearFit fit = linear_fit(x, y);
    CHECK(fit.slope == 0.0);
    CHECK(fit.r_squared == 0.0);
}

TEST_CASE("linear fit under small noise") {
    CounterRng rng(15, 0);
    std::vector<double> x, y;
    for (int i = 0; i < 200; ++i) {
        x.push_back(i * 0.5);
        y.push_back(2.0 * x.back() + 0.01 * 100.0 * rng.normal());
    }
    const LinearFit fit = linear_fit(x, y);
    CHECK(fit.slope == doctest::Approx(2.0).epsilon(0.02));
    CHECK(fit.r_squared > 0.9);
}

TEST_CASE("linear fit equivariance and errors") {
    CounterRng rng(16, 0);
    std::vector<double> x, y;
    for (int i = 0; i < 50; ++i) {
        x.push_back(rng.uniform() * 10.0);
        y.push_back(3.0 * x.back() - 1.0 + rng.normal());
    }
    const LinearFit f1 = linear_fit(x, y);
    std::vector<double> xs;
    for (double v : x) xs.push_back(4.0 * v);
    const LinearFit f2 = linear_fit(xs, y);
    CHECK(f2.slope == doctest::Approx(f1.slope / 4.0).epsilon(1e-12));
    CHECK(f2.r_squared == doctest::Approx(f1.r_squared).epsilon(1e-12));

    CHECK_THROWS_AS(linear_fit({1.0, 1.0, 1.0}, {1.0, 2.0, 3.0}), DomainError);
    CHECK_THROWS_AS(linear_fit({1.0, 2.0}, {1.0, 2.0}), InsufficientDataError);
    CHECK_THROWS_AS(linear_fit({1.0, 2.0, 3.0}, {1.0, 2.0}), ArityError);
}

TEST_CASE("repetition range pooling") {
    const TrapConfig trap = TrapConfig::isotropic_hz(125.0);
    RepetitionChain single;
    single.omega_samples = {42.0};
    const RepetitionRange one = repetition_range({single}, trap);
    CHECK(one.min_omega == 42.0);
    CHECK(one.max_omega == 42.0);
    CHECK(one.ratio_to_min_trap == doctest::Approx(42.0 / trap.min_omega()));

    RepetitionChain a, b;
    a.omega_samples = {3.0, 7.0, 5.0};
    b.omega_samples = {2.5, 9.0};
    const RepetitionRange pooled = repetition_range({a, b}, trap);
    CHECK(pooled.min_omega == 2.5);
    CHECK(pooled.max_omega == 9.0);

    RepetitionChain empty;
    CHECK_THROWS_AS(repetition_range({empty}, trap), InsufficientDataError);
}
