#pragma once

#include <cmath>
#include <cstdint>
#include <future>
#include <string>
#include <thread>
#include <vector>

#include "atomcomb/analysis.hpp"
#include "atomcomb/core.hpp"
#include "atomcomb/errors.hpp"
#include "atomcomb/field.hpp"
#include "atomcomb/fugacity.hpp"
#include "atomcomb/rng.hpp"
#include "atomcomb/spectrum.hpp"

namespace atomcomb {

struct SweepPlan {
    std::vector<double> temperatures;  // K, ascending
    std::vector<TrapConfig> traps;     // grid for trap sweeps; front() anchors temperature sweeps
    double n_mean = 5000.0;
    double n_sigma = -1.0;             // < 0 selects the Poissonian default sqrt(n_mean)
    std::uint64_t realizations = 10000;
    std::uint64_t master_seed = 1;
    double phi0 = kPi / 20.0;
    double delta = kPi / 200.0;
    int modes_cap = 500;
    unsigned workers = 0;              // 0 selects hardware concurrency

    double effective_sigma() const { return n_sigma < 0.0 ? std::sqrt(n_mean) : n_sigma; }

    void validate() const {
        if (temperatures.empty()) throw DomainError("temperature grid is empty");
        for (std::size_t i = 0; i + 1 < temperatures.size(); ++i)
            if (!(temperatures[i] < temperatures[i + 1])) throw DomainError("temperature grid must ascend");
        if (traps.empty()) throw DomainError("trap grid is empty");
        if (!(n_mean >= 1.0)) throw DomainError("n_mean must be >= 1");
        if (realizations < 1) throw DomainError("realizations must be >= 1");
        if (modes_cap < 2) throw DomainError("modes cap must be >= 2");
    }
};

struct SweepRow {
    std::size_t index = 0;
    double temperature = 0.0;  // K
    TrapConfig trap;
    std::uint64_t seed = 0;
    long long n_drawn = 0;
    double t_c = 0.0;  // K

    // Fugacity solve at the point (default truncation).
    double z_star = 0.0;
    double mu_star = 0.0;
    double solve_residual = 0.0;
    bool solve_truncated = false;

    // Comb fit and chain statistics.
    int spectrum_degree = 0;
    double omega_rep_fit = 0.0;
    bool not_a_comb = false;
    std::uint64_t n_omega_samples = 0;
    double omega_mean = 0.0;
    double omega_std = 0.0;
    double omega_min = 0.0;
    double omega_max = 0.0;
    double acceptance_rate = 0.0;
    bool frozen_chain = false;
    bool energy_bound_ok = true;  // max omega <= omega_x + omega_y + omega_z

    // Envelope of the repetition-frequency distribution.
    bool envelope_valid = false;
    double envelope_center = 0.0;
    double envelope_sigma = 0.0;
    double envelope_skewness = 0.0;

    ErrorCode error = ErrorCode::none;
    std::string error_message;

    std::vector<double> omega_samples;  // retained for scatter tables
};

/// Gaussian total-atom-number draw, rounded and clamped to >= 1.
inline long long draw_particle_number(double n_mean, double n_sigma, CounterRng& rng) {
    if (!(n_mean >= 1.0)) throw DomainError("n_mean must be >= 1");
    if (!(n_sigma >= 0.0)) throw DomainError("n_sigma must be >= 0");
    const double draw = n_mean + n_sigma * rng.normal();
    const long long n = std::llround(draw);
    return n < 1 ? 1 : n;
}

namespace sweep_detail {

inline void run_point(SweepRow& row, const SweepPlan& plan) {
    try {
        CounterRng rng(row.seed, 0);
        row.n_drawn = draw_particle_number(plan.n_mean, plan.effective_sigma(), rng);
        row.t_c = critical_temperature(static_cast<double>(row.n_drawn), row.trap);

        try {
            const FugacitySolveResult solve =
                solve_fugacity(static_cast<double>(row.n_drawn), row.temperature, row.trap);
            row.z_star = solve.z_star;
            row.mu_star = solve.mu_star;
            row.solve_residual = solve.residual;
            row.solve_truncated = solve.truncated;
        } catch (const NoSolutionError&) {
            // The row keeps going: the comb spectrum does not need z_star.
            row.z_star = 0.0;
        }

        row.spectrum_degree = default_spectrum_degree(row.trap, row.temperature, plan.modes_cap);
        const CombPolynomial poly = build_polynomial(static_cast<double>(row.n_drawn), row.temperature,
                                                     row.trap, row.spectrum_degree);
        const ChemicalSpectrum spec = spectrum_from_roots(complex_roots(poly), row.temperature);
        const CombFit fit = comb_fit(spec);
        row.omega_rep_fit = fit.omega_rep;
        row.not_a_comb = fit.not_a_comb;

        CounterRng chain_rng(row.seed, 1);
        const std::uint64_t burn = plan.realizations / 10;
        const RepetitionChain chain =
            metropolis_repetition(spec, fit, row.temperature, plan.realizations, burn, chain_rng);
        row.acceptance_rate = chain.acceptance_rate;
        row.frozen_chain = chain.frozen_warning;
        row.n_omega_samples = chain.omega_samples.size();

        double sum = 0.0, lo = chain.omega_samples.front(), hi = lo;
        for (double w : chain.omega_samples) {
            sum += w;
            lo = std::min(lo, w);
            hi = std::max(hi, w);
        }
        row.omega_mean = sum / static_cast<double>(chain.omega_samples.size());
        double var = 0.0;
        for (double w : chain.omega_samples) var += (w - row.omega_mean) * (w - row.omega_mean);
        row.omega_std = std::sqrt(var / static_cast<double>(chain.omega_samples.size()));
        row.omega_min = lo;
        row.omega_max = hi;
        row.energy_bound_ok = hi <= row.trap.sum_omega();

        try {
            const Histogram h = make_histogram(chain.omega_samples, auto_bin_count(chain.omega_samples));
            const EnvelopeFit env = envelope_fit(h);
            row.envelope_valid = true;
            row.envelope_center = env.center;
            row.envelope_sigma = env.sigma;
            row.envelope_skewness = env.skewness;
        } catch (const Error&) {
            row.envelope_valid = false;
        }

        row.omega_samples = chain.omega_samples;
    } catch (const Error& e) {
        row.error = e.code();
        row.error_message = e.what();
    } catch (const std::exception& e) {
        row.error = ErrorCode::domain;
        row.error_message = e.what();
    }
}

inline void run_rows(std::vector<SweepRow>& rows, const SweepPlan& plan) {
    unsigned workers = plan.workers == 0 ? std::thread::hardware_concurrency() : plan.workers;
    if (workers < 1) workers = 1;
    if (workers == 1 || rows.size() <= 1) {
        for (SweepRow& row : rows) run_point(row, plan);
        return;
    }
    for (std::size_t base = 0; base < rows.size(); base += workers) {
        std::vector<std::future<void>> wave;
        const std::size_t end = std::min(rows.size(), base + workers);
        for (std::size_t i = base; i < end; ++i)
            wave.push_back(std::async(std::launch::async, [&rows, &plan, i] { run_point(rows[i], plan); }));
        for (auto& f : wave) f.get();
    }
}

}  // namespace sweep_detail

/// One row per temperature grid point at the plan's anchor trap. Per-point
/// seeds derive from (master_seed, flat index); failed points carry their
/// error code and the sweep keeps going.
inline std::vector<SweepRow> temperature_sweep(const SweepPlan& plan) {
    plan.validate();
    std::vector<SweepRow> rows(plan.temperatures.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        rows[i].index = i;
        rows[i].temperature = plan.temperatures[i];
        rows[i].trap = plan.traps.front();
        rows[i].seed = derive_seed(plan.master_seed, i);
    }
    sweep_detail::run_rows(rows, plan);
    return rows;
}

/// Rows over (temperature, trap) grid pairs, temperature-major order.
inline std::vector<SweepRow> trap_sweep(const SweepPlan& plan) {
    plan.validate();
    std::vector<SweepRow> rows(plan.temperatures.size() * plan.traps.size());
    std::size_t flat = 0;
    for (std::size_t t = 0; t < plan.temperatures.size(); ++t) {
        for (std::size_t w = 0; w < plan.traps.size(); ++w, ++flat) {
            rows[flat].index = flat;
            rows[flat].temperature = plan.temperatures[t];
            rows[flat].trap = plan.traps[w];
            rows[flat].seed = derive_seed(plan.master_seed, flat);
        }
    }
    sweep_detail::run_rows(rows, plan);
    return rows;
}

}  // namespace atomcomb
