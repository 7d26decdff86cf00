#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "atomcomb/core.hpp"
#include "atomcomb/errors.hpp"
#include "atomcomb/field.hpp"

namespace atomcomb {

struct Histogram {
    std::vector<double> edges;        // ascending, size = counts.size() + 1
    std::vector<std::uint64_t> counts;
    std::uint64_t total = 0;

    double center(std::size_t i) const { return 0.5 * (edges[i] + edges[i + 1]); }
    double width(std::size_t i) const { return edges[i + 1] - edges[i]; }
};

struct EnvelopeFit {
    double amplitude = 0.0;
    double center = 0.0;
    double sigma = 0.0;
    double skewness = 0.0;
    double goodness = 0.0;  // rms residual relative to the peak count
};

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

/// Histogram over explicit ascending edges; half-open bins, last bin closed.
inline Histogram make_histogram(const std::vector<double>& values, std::vector<double> edges) {
    if (values.empty()) throw InsufficientDataError("histogram needs at least one value");
    if (edges.size() < 2) throw DomainError("histogram needs at least one bin");
    for (std::size_t i = 0; i + 1 < edges.size(); ++i)
        if (!(edges[i] < edges[i + 1])) throw DomainError("histogram edges must be strictly ascending");

    Histogram h;
    h.edges = std::move(edges);
    h.counts.assign(h.edges.size() - 1, 0);
    for (double v : values) {
        if (v < h.edges.front() || v > h.edges.back()) continue;
        std::size_t i = static_cast<std::size_t>(
            std::upper_bound(h.edges.begin(), h.edges.end(), v) - h.edges.begin());
        if (i == 0) continue;
        std::size_t bin = i - 1;
        if (bin >= h.counts.size()) bin = h.counts.size() - 1;  // last bin closed
        ++h.counts[bin];
        ++h.total;
    }
    return h;
}

/// Histogram with `bins` equal-width bins spanning [min, max].
inline Histogram make_histogram(const std::vector<double>& values, std::size_t bins) {
    if (values.empty()) throw InsufficientDataError("histogram needs at least one value");
    if (bins < 1) throw DomainError("histogram needs at least one bin");
    const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
    const double lo = *lo_it, hi = *hi_it;
    if (!(hi > lo)) throw DegenerateRangeError("all values identical; cannot build automatic edges");
    std::vector<double> edges(bins + 1);
    for (std::size_t i = 0; i <= bins; ++i)
        edges[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(bins);
    edges.back() = hi;
    return make_histogram(values, std::move(edges));
}

/// Freedman-Diaconis bin count with a floor of 20.
inline std::size_t auto_bin_count(std::vector<double> values) {
    if (values.size() < 2) return 20;
    std::sort(values.begin(), values.end());
    const double q1 = values[values.size() / 4];
    const double q3 = values[(3 * values.size()) / 4];
    const double iqr = q3 - q1;
    const double span = values.back() - values.front();
    if (!(iqr > 0.0) || !(span > 0.0)) return 20;
    const double h = 2.0 * iqr / std::cbrt(static_cast<double>(values.size()));
    const std::size_t bins = static_cast<std::size_t>(std::ceil(span / h));
    return std::max<std::size_t>(20, std::min<std::size_t>(bins, 512));
}

/// Moment-based envelope: center, sigma and skewness from the binned mass,
/// Gaussian amplitude by least squares at those moments.
inline EnvelopeFit envelope_fit(const Histogram& h) {
    std::size_t non_empty = 0;
    for (auto c : h.counts)
        if (c > 0) ++non_empty;
    if (non_empty < 5)
        throw InsufficientDataError("envelope fit needs >= 5 non-empty bins, got " + std::to_string(non_empty));

    const double total = static_cast<double>(h.total);
    double mean = 0.0;
    for (std::size_t i = 0; i < h.counts.size(); ++i) mean += h.center(i) * static_cast<double>(h.counts[i]);
    mean /= total;
    double m2 = 0.0, m3 = 0.0;
    for (std::size_t i = 0; i < h.counts.size(); ++i) {
        const double d = h.center(i) - mean;
        const double w = static_cast<double>(h.counts[i]);
        m2 += w * d * d;
        m3 += w * d * d * d;
    }
    m2 /= total;
    m3 /= total;

    EnvelopeFit fit;
    fit.center = mean;
    fit.sigma = std::sqrt(m2);
    fit.skewness = m3 / (m2 * std::sqrt(m2));

    double num = 0.0, den = 0.0, peak = 0.0;
    std::vector<double> shape(h.counts.size());
    for (std::size_t i = 0; i < h.counts.size(); ++i) {
        const double d = (h.center(i) - fit.center) / fit.sigma;
        shape[i] = std::exp(-0.5 * d * d);
        num += shape[i] * static_cast<double>(h.counts[i]);
        den += shape[i] * shape[i];
        peak = std::max(peak, static_cast<double>(h.counts[i]));
    }
    fit.amplitude = num / den;
    double ss = 0.0;
    for (std::size_t i = 0; i < h.counts.size(); ++i) {
        const double r = static_cast<double>(h.counts[i]) - fit.amplitude * shape[i];
        ss += r * r;
    }
    fit.goodness = std::sqrt(ss / static_cast<double>(h.counts.size())) / peak;
    return fit;
}

/// Ordinary least squares y = slope x + intercept.
inline LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw ArityError("x and y lengths differ");
    if (x.size() < 3) throw InsufficientDataError("linear fit needs >= 3 points");
    const double n = static_cast<double>(x.size());
    double sx = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (!(sxx > 0.0)) throw DomainError("x values are all equal");

    LinearFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (fit.slope * x[i] + fit.intercept);
        ss_res += r * r;
    }
    fit.r_squared = (syy > 0.0) ? 1.0 - ss_res / syy : 0.0;
    return fit;
}

struct RepetitionRange {
    double min_omega = 0.0;  // rad/s
    double max_omega = 0.0;  // rad/s
    double ratio_to_min_trap = 0.0;
};

/// Pooled min/max repetition frequency over chains and the ratio to the
/// smallest trap frequency.
inline RepetitionRange repetition_range(const std::vector<RepetitionChain>& chains, const TrapConfig& trap) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    std::uint64_t n = 0;
    for (const RepetitionChain& c : chains) {
        for (double w : c.omega_samples) {
            lo = std::min(lo, w);
            hi = std::max(hi, w);
            ++n;
        }
    }
    if (n == 0) throw InsufficientDataError("no repetition-frequency samples pooled");
    return {lo, hi, lo / trap.min_omega()};
}

}  // namespace atomcomb
