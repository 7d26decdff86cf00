#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "atomcomb/core.hpp"
#include "atomcomb/errors.hpp"

namespace atomcomb {

struct SeriesTruncation {
    int j_max = 2000;        // highest retained series index
    double tail_tol = 1e-12; // relative geometric tail bound

    SeriesTruncation() = default;
    SeriesTruncation(int jm, double tol) : j_max(jm), tail_tol(tol) {
        if (jm < 1) throw DomainError("j_max must be >= 1");
        if (!(tol > 0.0)) throw DomainError("tail_tol must be > 0");
    }
};

struct SeriesEval {
    double value = 0.0;      // occupancy, dimensionless
    int j_used = 0;          // terms actually summed
    double tail_bound = 0.0; // rigorous bound on the neglected tail
    bool truncated = false;  // j_max hit before the tail bound met tail_tol
};

struct FugacitySolveResult {
    double z_star = 0.0;    // fugacity
    double mu_star = 0.0;   // ln(z_star)/(beta*hbar), rad/s
    double residual = 0.0;  // |LHS - N| / N
    int iterations = 0;
    bool truncated = false; // series truncation warning at the root
};

/// Occupancy series in the fugacity z,
///   sum_{j>=1} z^j [ prod_l (1 - e^{-j beta hbar omega_l})^{-1} - 1 ],
/// with per-index log-coefficients cached across evaluations. Terms are
/// assembled in log space so neither z^j nor the coefficients overflow or
/// lose the tiny tails to cancellation.
class OccupancySeries {
public:
    OccupancySeries(double beta, const TrapConfig& trap)
        : beta_(beta), trap_(trap), bh_omega_min_(beta * kHbar * trap.min_omega()) {
        if (!(beta > 0.0)) throw DomainError("beta must be > 0");
    }

    double beta() const { return beta_; }
    const TrapConfig& trap() const { return trap_; }

    /// log of the series upper domain edge e^{beta hbar min(omega)}.
    double log_upper() const { return bh_omega_min_; }

    /// log a_j; -inf once the coefficient underflows to zero.
    double log_coefficient(int j) {
        ensure(j);
        return log_a_[static_cast<std::size_t>(j)];
    }

    SeriesEval evaluate(double z, const SeriesTruncation& trunc) {
        if (!(z >= 0.0)) throw DomainError("fugacity must be >= 0");
        SeriesEval out;
        if (z == 0.0) return out;
        const double lz = std::log(z);
        if (!(lz < bh_omega_min_ + std::log1p(-1e-9)))
            throw DomainError("fugacity outside the series domain (z >= e^{beta hbar min omega})");
        // Coefficient ratio bound a_{j+1}/a_j <= e^{-beta hbar min omega}
        // makes the tail geometric with ratio r.
        const double r = std::exp(lz - bh_omega_min_);
        double sum = 0.0;
        int j = 0;
        while (j < trunc.j_max) {
            ++j;
            const double la = log_coefficient(j);
            if (la == -std::numeric_limits<double>::infinity()) {
                out.tail_bound = 0.0;
                out.value = sum;
                out.j_used = j - 1;
                return out;
            }
            sum += std::exp(static_cast<double>(j) * lz + la);
            if ((j & 0xF) == 0 || j == trunc.j_max) {
                const double next = std::exp(static_cast<double>(j + 1) * lz + log_coefficient(j + 1));
                const double bound = next / (1.0 - r);
                if (bound <= trunc.tail_tol * sum) {
                    out.value = sum;
                    out.j_used = j;
                    out.tail_bound = bound;
                    return out;
                }
                if (j == trunc.j_max) {
                    out.value = sum;
                    out.j_used = j;
                    out.tail_bound = bound;
                    out.truncated = true;
                    return out;
                }
            }
        }
        out.value = sum;
        out.j_used = j;
        return out;
    }

private:
    void ensure(int j) {
        const std::size_t need = static_cast<std::size_t>(j) + 1;
        if (log_a_.size() >= need) return;
        if (log_a_.empty()) log_a_.push_back(-std::numeric_limits<double>::infinity());  // j = 0 unused
        const double bh = beta_ * kHbar;
        for (std::size_t i = log_a_.size(); i < need; ++i) {
            const double j = static_cast<double>(i);
            const double x_min = j * bh * trap_.min_omega();
            double la;
            if (x_min > 30.0) {
                // a_j = sum_l e^{-j beta hbar omega_l} to relative e^{-30};
                // log-sum-exp keeps the exponent finite long after e^{-x}
                // itself underflows.
                double acc = 0.0;
                for (double w : trap_.axes()) acc += std::exp(-(j * bh * w - x_min));
                la = -x_min + std::log(acc);
            } else {
                double s = 0.0;
                for (double w : trap_.axes()) s -= std::log1p(-std::exp(-j * bh * w));
                la = (s > 1e-3) ? std::log(std::expm1(s)) : std::log(s) + std::log1p(s * (0.5 + s / 6.0));
            }
            log_a_.push_back(la);
        }
    }

    double beta_;
    TrapConfig trap_;
    double bh_omega_min_;
    std::vector<double> log_a_;
};

/// Truncated particle-number series at fugacity z.
inline SeriesEval series_lhs(double z, double beta, const TrapConfig& trap,
                             const SeriesTruncation& trunc = SeriesTruncation{}) {
    OccupancySeries series(beta, trap);
    return series.evaluate(z, trunc);
}

/// Direct Bose-Einstein occupation sum over an explicit mode lattice:
///   sum_k (z^{-1} e^{beta eps_k} - 1)^{-1}.
/// Independent of the series route; the ground state must not be present.
inline double occupancy_oracle(double z, double beta, const ModeSpectrum& modes) {
    if (!(z >= 0.0)) throw DomainError("fugacity must be >= 0");
    if (z == 0.0) return 0.0;
    const double lz = std::log(z);
    double sum = 0.0;
    for (const ModeEntry& m : modes.entries) {
        const double d = beta * m.energy - lz;
        if (d <= 0.0)
            throw PoleError("occupation pole: z e^{-beta eps} >= 1 at mode energy " + std::to_string(m.energy));
        sum += 1.0 / std::expm1(d);
    }
    return sum;
}

/// Solves series_lhs(z) = N by bisection with a secant polish. The bracket
/// upper edge sits just inside the series convergence radius, where the
/// truncated sum is largest.
inline FugacitySolveResult solve_fugacity(double n_atoms, double temperature_kelvin, const TrapConfig& trap,
                                          const SeriesTruncation& trunc = SeriesTruncation{}) {
    if (!(n_atoms > 0.0)) throw DomainError("atom number must be > 0");
    const ThermalScales th = thermal_scales(temperature_kelvin);
    OccupancySeries series(th.beta, trap);
    // Margin below the domain edge so the exp/log round-trip cannot push the
    // bracket top back out of the domain.
    const double log_upper = series.log_upper() + std::log1p(-1e-9) - 1e-12;
    if (log_upper > 700.0)
        throw DomainError("beta hbar omega too large: fugacity bracket not representable");

    const double z_hi = std::exp(log_upper);
    SeriesEval hi_eval = series.evaluate(z_hi, trunc);
    if (hi_eval.value < n_atoms)
        throw NoSolutionError("series_lhs(" + std::to_string(z_hi) + ") = " + std::to_string(hi_eval.value) +
                              " < N = " + std::to_string(n_atoms) + " at the bracket top (bracket [0, " +
                              std::to_string(z_hi) + "])");

    double lo = 0.0, hi = z_hi;
    double f_lo = -n_atoms, f_hi = hi_eval.value - n_atoms;
    int iterations = 0;
    double best_z = hi, best_f = f_hi;
    SeriesEval best_eval = hi_eval;
    for (int i = 0; i < 200 && hi - lo > 1e-17 * hi; ++i) {
        // Secant candidate, clamped inside the bracket; fall back to the
        // midpoint whenever it does not steadily shrink the interval.
        double mid;
        if (f_hi != f_lo) {
            mid = lo - f_lo * (hi - lo) / (f_hi - f_lo);
            const double span = hi - lo;
            if (!(mid > lo + 1e-3 * span && mid < hi - 1e-3 * span) || (i % 2 == 0))
                mid = 0.5 * (lo + hi);
        } else {
            mid = 0.5 * (lo + hi);
        }
        const SeriesEval e = series.evaluate(mid, trunc);
        const double f = e.value - n_atoms;
        ++iterations;
        if (std::abs(f) < std::abs(best_f)) {
            best_f = f;
            best_z = mid;
            best_eval = e;
        }
        if (std::abs(best_f) <= 1e-14 * n_atoms) break;
        if (f < 0.0) {
            lo = mid;
            f_lo = f;
        } else {
            hi = mid;
            f_hi = f;
        }
    }

    FugacitySolveResult out;
    out.z_star = best_z;
    out.mu_star = std::log(best_z) / th.tau;
    out.residual = std::abs(best_f) / n_atoms;
    out.iterations = iterations;
    out.truncated = best_eval.truncated;
    return out;
}

/// Ideal-gas condensation temperature of a harmonic trap,
///   T_c = (hbar omega_gm / kB) (N / zeta(3))^{1/3}.
inline double critical_temperature(double n_atoms, const TrapConfig& trap) {
    if (!(n_atoms >= 1.0)) throw DomainError("atom number must be >= 1");
    return (kHbar * trap.geometric_mean() / kBoltzmann) * std::cbrt(n_atoms / kZeta3);
}

}  // namespace atomcomb
