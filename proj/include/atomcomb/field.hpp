#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <string>
#include <thread>
#include <vector>

#include "atomcomb/core.hpp"
#include "atomcomb/errors.hpp"
#include "atomcomb/rng.hpp"
#include "atomcomb/spectrum.hpp"

namespace atomcomb {

enum class WeightKind {
    complex_normal,     // c = x + iy, x,y ~ N(0,1)
    real_normal,        // c = x, x ~ N(0,1)
    unit_uniform_phase, // c = e^{i theta}, theta ~ U(-pi, pi]
};

inline const char* weight_kind_name(WeightKind k) {
    switch (k) {
        case WeightKind::complex_normal: return "complex-normal";
        case WeightKind::real_normal: return "real-normal";
        case WeightKind::unit_uniform_phase: return "unit-uniform-phase";
    }
    return "unknown";
}

struct WeightModel {
    WeightKind kind = WeightKind::complex_normal;

    Complex draw(CounterRng& rng) const {
        switch (kind) {
            case WeightKind::complex_normal: {
                const double re = rng.normal();
                const double im = rng.normal();
                return {re, im};
            }
            case WeightKind::real_normal: return {rng.normal(), 0.0};
            case WeightKind::unit_uniform_phase: return std::polar(1.0, rng.angle());
        }
        return {0.0, 0.0};
    }
};

struct FieldSample {
    Complex psi;
    double phase = 0.0;    // arg psi in (-pi, pi]
    double modulus = 0.0;  // |psi|
    std::uint64_t draw_index = 0;
};

struct FieldStats {
    std::uint64_t n = 0;
    Complex mean{0.0, 0.0};
    double var_re = 0.0;
    double var_im = 0.0;
    double cov_re_im = 0.0;
};

struct FieldEnsemble {
    std::vector<FieldSample> samples;
    std::uint64_t n = 0;
    Complex mean{0.0, 0.0};
    double var_re = 0.0;
    double var_im = 0.0;
    double cov_re_im = 0.0;
    std::uint64_t master_seed = 0;
};

/// Forward/backward coherent pair psi_pm(t) = sum_k c_k e^{-+ i phi_k(t)}
/// with phi_k(t) = Re(mu_k) t.
inline std::pair<Complex, Complex> coherent_pair(double t, const ChemicalSpectrum& spec,
                                                 const std::vector<Complex>& weights) {
    if (weights.size() != spec.size())
        throw ArityError("weights/spectrum length mismatch: " + std::to_string(weights.size()) + " vs " +
                         std::to_string(spec.size()));
    Complex plus(0.0, 0.0), minus(0.0, 0.0);
    for (std::size_t k = 0; k < spec.size(); ++k) {
        const double phi = spec.mus[k].real() * t;
        const Complex rot = std::polar(1.0, phi);
        plus += weights[k] * std::conj(rot);
        minus += weights[k] * rot;
    }
    return {plus, minus};
}

/// Precomputed per-mode thermal factors e^{-beta hbar mu_k}; shared by every
/// sample of an ensemble.
class ThermalFieldKernel {
public:
    explicit ThermalFieldKernel(const ChemicalSpectrum& spec) {
        if (spec.size() == 0) throw InsufficientDataError("spectrum is empty");
        factors_.reserve(spec.size());
        for (const Complex& mu : spec.mus) {
            const double x = spec.beta_hbar * mu.real();
            if (std::abs(x) > 700.0)
                throw ScalingError("beta hbar |Re mu| = " + std::to_string(std::abs(x)) +
                                   " would overflow the thermal factor");
            factors_.push_back(std::exp(-spec.beta_hbar * mu));
        }
    }

    std::size_t modes() const { return factors_.size(); }
    const std::vector<Complex>& factors() const { return factors_; }

    Complex sample_psi(const WeightModel& model, CounterRng& rng) const {
        Complex psi(0.0, 0.0);
        for (const Complex& f : factors_) psi += model.draw(rng) * f;
        return psi;
    }

private:
    std::vector<Complex> factors_;
};

/// One thermal-field realization psi = sum_k c_k e^{-beta hbar mu_k}.
inline FieldSample thermal_field_sample(const ChemicalSpectrum& spec, const WeightModel& model,
                                        CounterRng& rng, std::uint64_t draw_index = 0) {
    const ThermalFieldKernel kernel(spec);
    FieldSample s;
    s.psi = kernel.sample_psi(model, rng);
    s.phase = std::arg(s.psi);
    s.modulus = std::abs(s.psi);
    s.draw_index = draw_index;
    return s;
}

namespace field_detail {

struct BlockSums {
    double re = 0.0, im = 0.0;
    double re2 = 0.0, im2 = 0.0, reim = 0.0;
};

/// Samples are generated from per-index substreams and accumulated in fixed
/// 64k blocks combined in block order, so results are bit-identical for any
/// worker count.
template <typename PerSample>
inline FieldStats accumulate_ensemble(const ThermalFieldKernel& kernel, const WeightModel& model,
                                      std::uint64_t n, std::uint64_t master_seed, unsigned workers,
                                      PerSample&& per_sample) {
    constexpr std::uint64_t kBlock = 65536;
    const std::uint64_t n_blocks = (n + kBlock - 1) / kBlock;
    std::vector<BlockSums> sums(static_cast<std::size_t>(n_blocks));

    auto run_block = [&](std::uint64_t b) {
        BlockSums acc;
        const std::uint64_t lo = b * kBlock;
        const std::uint64_t hi = std::min(n, lo + kBlock);
        for (std::uint64_t i = lo; i < hi; ++i) {
            CounterRng rng(master_seed, i);
            const Complex psi = kernel.sample_psi(model, rng);
            acc.re += psi.real();
            acc.im += psi.imag();
            acc.re2 += psi.real() * psi.real();
            acc.im2 += psi.imag() * psi.imag();
            acc.reim += psi.real() * psi.imag();
            per_sample(i, psi);
        }
        sums[static_cast<std::size_t>(b)] = acc;
    };

    if (workers <= 1 || n_blocks <= 1) {
        for (std::uint64_t b = 0; b < n_blocks; ++b) run_block(b);
    } else {
        std::atomic<std::uint64_t> next{0};
        std::vector<std::thread> pool;
        const unsigned count = std::min<std::uint64_t>(workers, n_blocks);
        pool.reserve(count);
        for (unsigned w = 0; w < count; ++w) {
            pool.emplace_back([&] {
                for (std::uint64_t b = next.fetch_add(1); b < n_blocks; b = next.fetch_add(1)) run_block(b);
            });
        }
        for (auto& t : pool) t.join();
    }

    BlockSums total;
    for (const BlockSums& s : sums) {
        total.re += s.re;
        total.im += s.im;
        total.re2 += s.re2;
        total.im2 += s.im2;
        total.reim += s.reim;
    }
    FieldStats st;
    st.n = n;
    const double dn = static_cast<double>(n);
    st.mean = Complex(total.re / dn, total.im / dn);
    st.var_re = total.re2 / dn - st.mean.real() * st.mean.real();
    st.var_im = total.im2 / dn - st.mean.imag() * st.mean.imag();
    st.cov_re_im = total.reim / dn - st.mean.real() * st.mean.imag();
    return st;
}

}  // namespace field_detail

/// Streaming summary statistics over n realizations; no per-sample storage.
inline FieldStats ensemble_stats(const ChemicalSpectrum& spec, const WeightModel& model, std::uint64_t n,
                                 std::uint64_t master_seed, unsigned workers = std::thread::hardware_concurrency()) {
    if (n < 1) throw DomainError("ensemble size must be >= 1");
    const ThermalFieldKernel kernel(spec);
    return field_detail::accumulate_ensemble(kernel, model, n, master_seed, workers,
                                             [](std::uint64_t, const Complex&) {});
}

/// Full ensemble with stored samples. Per-sample substreams keyed on the
/// sample index make the output independent of scheduling order.
inline FieldEnsemble run_ensemble(const ChemicalSpectrum& spec, const WeightModel& model, std::uint64_t n,
                                  std::uint64_t master_seed,
                                  unsigned workers = std::thread::hardware_concurrency()) {
    if (n < 1) throw DomainError("ensemble size must be >= 1");
    const ThermalFieldKernel kernel(spec);
    FieldEnsemble ens;
    ens.master_seed = master_seed;
    ens.samples.resize(static_cast<std::size_t>(n));
    const FieldStats st = field_detail::accumulate_ensemble(
        kernel, model, n, master_seed, workers, [&](std::uint64_t i, const Complex& psi) {
            FieldSample& s = ens.samples[static_cast<std::size_t>(i)];
            s.psi = psi;
            s.phase = std::arg(psi);
            s.modulus = std::abs(psi);
            s.draw_index = i;
        });
    ens.n = st.n;
    ens.mean = st.mean;
    ens.var_re = st.var_re;
    ens.var_im = st.var_im;
    ens.cov_re_im = st.cov_re_im;
    return ens;
}

/// Circular distance from phase to the nearest integer multiple of phi0.
inline double phase_distance_to_comb(double phase, double phi0) {
    auto line = [&](double x) {
        const double m = std::round(x / phi0);
        return std::abs(x - m * phi0);
    };
    return std::min({line(phase), line(phase + kTwoPi), line(phase - kTwoPi)});
}

/// Keeps samples whose phase lies within delta of an integer multiple of
/// phi0; order preserved, summary statistics recomputed.
inline FieldEnsemble phase_filter(const FieldEnsemble& ens, double phi0, double delta) {
    if (!(phi0 > 0.0 && phi0 <= kPi)) throw DomainError("phi0 must lie in (0, pi]");
    if (!(delta > 0.0 && delta <= 0.5 * phi0)) throw DomainError("delta must lie in (0, phi0/2]");
    FieldEnsemble out;
    out.master_seed = ens.master_seed;
    for (const FieldSample& s : ens.samples)
        if (phase_distance_to_comb(s.phase, phi0) <= delta) out.samples.push_back(s);
    out.n = out.samples.size();
    if (out.n > 0) {
        double re = 0.0, im = 0.0, re2 = 0.0, im2 = 0.0, reim = 0.0;
        for (const FieldSample& s : out.samples) {
            re += s.psi.real();
            im += s.psi.imag();
            re2 += s.psi.real() * s.psi.real();
            im2 += s.psi.imag() * s.psi.imag();
            reim += s.psi.real() * s.psi.imag();
        }
        const double dn = static_cast<double>(out.n);
        out.mean = Complex(re / dn, im / dn);
        out.var_re = re2 / dn - out.mean.real() * out.mean.real();
        out.var_im = im2 / dn - out.mean.imag() * out.mean.imag();
        out.cov_re_im = reim / dn - out.mean.real() * out.mean.imag();
    }
    return out;
}

/// Metropolis walk over the comb teeth.
struct RepetitionChain {
    std::vector<long long> states;        // visited tooth numbers m (post burn-in)
    std::vector<double> mus;              // representative Re mu of the visited tooth, rad/s
    std::vector<double> omega_samples;    // Re mu_m / m, rad/s
    double acceptance_rate = 0.0;
    std::uint64_t burn_in = 0;
    std::uint64_t thinning = 1;
    bool frozen_warning = false;          // 10^4 consecutive rejected proposals
};

/// Random walk over comb states m (proposal m -> m+-1, reflecting at the
/// ends) with Boltzmann acceptance min(1, e^{-beta hbar (|mu'| - |mu|)})
/// where mu = omega m from the fit. Starts at the tooth nearest
/// beta hbar mu = 1. Each visit emits omega_sample = Re(mu_m)/m built from
/// the spectrum values assigned to tooth m.
inline RepetitionChain metropolis_repetition(const ChemicalSpectrum& spec, const CombFit& fit,
                                             double temperature_kelvin, std::uint64_t chain_len,
                                             std::uint64_t burn_in, CounterRng& rng,
                                             std::uint64_t thinning = 1) {
    if (chain_len <= burn_in) throw DomainError("chain_len must exceed burn_in");
    if (thinning < 1) throw DomainError("thinning must be >= 1");
    if (fit.assignments.size() != spec.size())
        throw ArityError("fit assignments do not match the spectrum");

    // Teeth m >= 1 with the mean Re mu of the entries assigned to each.
    std::vector<long long> teeth;
    std::vector<double> rep_value;
    {
        std::vector<std::pair<long long, double>> acc;
        for (std::size_t k = 0; k < spec.size(); ++k) {
            const long long m = fit.assignments[k];
            if (m < 1) continue;
            acc.emplace_back(m, spec.mus[k].real());
        }
        std::sort(acc.begin(), acc.end());
        for (std::size_t i = 0; i < acc.size();) {
            std::size_t j = i;
            double sum = 0.0;
            while (j < acc.size() && acc[j].first == acc[i].first) sum += acc[j++].second;
            teeth.push_back(acc[i].first);
            rep_value.push_back(sum / static_cast<double>(j - i));
            i = j;
        }
    }
    if (teeth.size() < 2) throw InsufficientDataError("metropolis walk needs >= 2 comb teeth");

    const double bh = thermal_scales(temperature_kelvin).tau;
    auto mu_state = [&](std::size_t i) { return fit.omega_rep * static_cast<double>(teeth[i]); };

    // Initial tooth nearest beta hbar mu = 1.
    std::size_t state = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < teeth.size(); ++i) {
        const double d = std::abs(bh * mu_state(i) - 1.0);
        if (d < best) {
            best = d;
            state = i;
        }
    }

    RepetitionChain chain;
    chain.burn_in = burn_in;
    chain.thinning = thinning;
    std::uint64_t accepted = 0;
    std::uint64_t consecutive_rejects = 0;
    for (std::uint64_t step = 0; step < chain_len; ++step) {
        const bool up = rng.uniform() < 0.5;
        const std::size_t proposal = up ? state + 1 : (state == 0 ? teeth.size() : state - 1);
        bool accept = false;
        if (proposal < teeth.size()) {
            const double d = bh * (std::abs(mu_state(proposal)) - std::abs(mu_state(state)));
            accept = d <= 0.0 || rng.uniform() < std::exp(-d);
        }
        if (accept) {
            state = proposal;
            ++accepted;
            consecutive_rejects = 0;
        } else {
            ++consecutive_rejects;
            if (consecutive_rejects >= 10000) chain.frozen_warning = true;
        }
        if (step >= burn_in && (step - burn_in) % thinning == 0) {
            chain.states.push_back(teeth[state]);
            chain.mus.push_back(rep_value[state]);
            chain.omega_samples.push_back(rep_value[state] / static_cast<double>(teeth[state]));
        }
    }
    chain.acceptance_rate = static_cast<double>(accepted) / static_cast<double>(chain_len);
    return chain;
}

}  // namespace atomcomb
