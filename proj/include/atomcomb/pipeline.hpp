#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "atomcomb/analysis.hpp"
#include "atomcomb/config.hpp"
#include "atomcomb/core.hpp"
#include "atomcomb/errors.hpp"
#include "atomcomb/field.hpp"
#include "atomcomb/fugacity.hpp"
#include "atomcomb/output.hpp"
#include "atomcomb/spectrum.hpp"
#include "atomcomb/sweep.hpp"

namespace atomcomb {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;
inline constexpr int kExitPartialSweep = 4;

struct PipelineResult {
    int exit_code = kExitOk;
    Manifest manifest;
    std::vector<std::string> messages;
};

namespace pipeline_detail {

inline bool write_tables(const RunConfig& cfg) { return cfg.format != OutputFormat::summary; }
inline bool write_summary(const RunConfig& cfg) { return cfg.format != OutputFormat::table; }

inline void describe_config(SummaryDoc& doc, const RunConfig& cfg) {
    doc.set("run.command", cfg.command);
    doc.set("run.seed", cfg.seed);
    doc.set("run.version", std::string(kVersion));
    doc.set("params.temperature_nk", cfg.temperature_nk);
    doc.set("params.n_mean", cfg.n_mean);
    doc.set("params.n_sigma_effective", cfg.n_sigma < 0.0 ? std::sqrt(cfg.n_mean) : cfg.n_sigma);
    doc.set("params.trap_fx_hz", cfg.trap_hz[0]);
    doc.set("params.trap_fy_hz", cfg.trap_hz[1]);
    doc.set("params.trap_fz_hz", cfg.trap_hz[2]);
    doc.set("params.phi0_rad", cfg.phi0_rad);
    doc.set("params.delta_rad", cfg.delta_rad);
    doc.set("params.realizations", cfg.realizations);
    doc.set("params.modes_cap", cfg.modes_cap);
}

inline void manifest_inputs(Manifest& m, const RunConfig& cfg) {
    m.command = cfg.command;
    m.seed = cfg.seed;
    m.inputs.emplace_back("temperature_nk", format_double(cfg.temperature_nk));
    m.inputs.emplace_back("n_mean", format_double(cfg.n_mean));
    m.inputs.emplace_back("trap_hz", format_double(cfg.trap_hz[0]) + "," + format_double(cfg.trap_hz[1]) + "," +
                                         format_double(cfg.trap_hz[2]));
    m.inputs.emplace_back("realizations", std::to_string(cfg.realizations));
}

inline CsvTable sweep_table(const std::vector<SweepRow>& rows) {
    CsvTable t;
    t.header = {"index",
                "temperature_nk",
                "trap_fx_hz",
                "trap_fy_hz",
                "trap_fz_hz",
                "seed",
                "n_drawn",
                "t_c_nk",
                "z_star",
                "mu_star_rad_per_s",
                "mu_star_hz",
                "solve_residual",
                "spectrum_degree",
                "omega_rep_fit_rad_per_s",
                "omega_rep_fit_hz",
                "omega_mean_rad_per_s",
                "omega_mean_hz",
                "omega_std_rad_per_s",
                "omega_min_rad_per_s",
                "omega_max_rad_per_s",
                "acceptance_rate",
                "envelope_center_rad_per_s",
                "envelope_sigma_rad_per_s",
                "envelope_skewness",
                "not_a_comb",
                "frozen_chain",
                "energy_bound_ok",
                "error_code"};
    for (const SweepRow& r : rows) {
        t.add_row({static_cast<double>(r.index),
                   r.temperature * 1e9,
                   r.trap.omega_x / kTwoPi,
                   r.trap.omega_y / kTwoPi,
                   r.trap.omega_z / kTwoPi,
                   static_cast<double>(r.seed),
                   static_cast<double>(r.n_drawn),
                   r.t_c * 1e9,
                   r.z_star,
                   r.mu_star,
                   r.mu_star / kTwoPi,
                   r.solve_residual,
                   static_cast<double>(r.spectrum_degree),
                   r.omega_rep_fit,
                   r.omega_rep_fit / kTwoPi,
                   r.omega_mean,
                   r.omega_mean / kTwoPi,
                   r.omega_std,
                   r.omega_min,
                   r.omega_max,
                   r.acceptance_rate,
                   r.envelope_center,
                   r.envelope_sigma,
                   r.envelope_skewness,
                   r.not_a_comb ? 1.0 : 0.0,
                   r.frozen_chain ? 1.0 : 0.0,
                   r.energy_bound_ok ? 1.0 : 0.0,
                   static_cast<double>(static_cast<int>(r.error))});
    }
    return t;
}

inline void summarize_rows(SummaryDoc& doc, const std::vector<SweepRow>& rows) {
    std::size_t failed = 0;
    for (const SweepRow& r : rows)
        if (r.error != ErrorCode::none) ++failed;
    doc.set("sweep.points", static_cast<std::uint64_t>(rows.size()));
    doc.set("sweep.failed_points", static_cast<std::uint64_t>(failed));
    for (const SweepRow& r : rows) {
        if (r.error == ErrorCode::none) continue;
        const std::string key = "sweep.errors.point_" + std::to_string(r.index);
        doc.set(key + ".code", std::string(error_code_name(r.error)));
        doc.set(key + ".message", r.error_message);
    }
}

inline std::string gnuplot_header(const std::string& out_png) {
    return "set terminal pngcairo size 900,700\nset output '" + out_png + "'\n";
}

}  // namespace pipeline_detail

/// Runs one CLI command end to end: computes, writes the data files named by
/// the command, then summary.txt, effective_config.json and manifest.txt.
inline PipelineResult run_pipeline(const RunConfig& cfg) {
    using namespace pipeline_detail;
    PipelineResult result;
    OutputWriter writer{std::filesystem::path(cfg.out_dir)};
    Manifest& manifest = result.manifest;

    try {
        cfg.validate();
        manifest_inputs(manifest, cfg);

        SummaryDoc doc;
        describe_config(doc, cfg);

        const TrapConfig trap = cfg.trap();
        const double temperature = cfg.temperature_kelvin();
        std::vector<std::string> plot_files;

        if (cfg.command == "tc") {
            const double tc = critical_temperature(cfg.n_mean, trap);
            doc.set("tc.t_c_nk", tc * 1e9);
            doc.set("tc.omega_gm_rad_per_s", trap.geometric_mean());
            doc.set("tc.omega_gm_hz", trap.geometric_mean() / kTwoPi);
            result.messages.push_back("T_c = " + format_double(tc * 1e9) + " nK");
        } else if (cfg.command == "solve") {
            const FugacitySolveResult r = solve_fugacity(cfg.n_mean, temperature, trap);
            doc.set("solve.z_star", r.z_star);
            doc.set("solve.mu_star_rad_per_s", r.mu_star);
            doc.set("solve.mu_star_hz", r.mu_star / kTwoPi);
            doc.set("solve.residual", r.residual);
            doc.set("solve.iterations", r.iterations);
            doc.set("solve.truncation_warning", r.truncated);
            result.messages.push_back("z* = " + format_double(r.z_star));
        } else if (cfg.command == "spectrum") {
            const int degree = default_spectrum_degree(trap, temperature, cfg.modes_cap);
            const CombPolynomial poly = build_polynomial(cfg.n_mean, temperature, trap, degree);
            const ChemicalSpectrum spec = spectrum_from_roots(complex_roots(poly), temperature);
            const CombFit fit = comb_fit(spec);
            if (write_tables(cfg)) {
                CsvTable t;
                t.header = {"re_mu_rad_per_s", "im_mu_rad_per_s", "re_mu_hz", "re_z", "im_z", "assignment_m"};
                for (std::size_t k = 0; k < spec.size(); ++k)
                    t.add_row({spec.mus[k].real(), spec.mus[k].imag(), spec.mus[k].real() / kTwoPi,
                               spec.source_roots[k].real(), spec.source_roots[k].imag(),
                               static_cast<double>(fit.assignments[k])});
                writer.write(manifest, "spectrum.csv", t.render());
            }
            doc.set("spectrum.degree", degree);
            doc.set("spectrum.requested_degree", poly.requested_degree);
            doc.set("spectrum.trimmed", poly.trimmed);
            doc.set("spectrum.beta_hbar_s", spec.beta_hbar);
            doc.set("comb_fit.omega_rep_rad_per_s", fit.omega_rep);
            doc.set("comb_fit.omega_rep_hz", fit.omega_rep / kTwoPi);
            doc.set("comb_fit.omega_0_rad_per_s", fit.omega_0);
            doc.set("comb_fit.rms_residual_rad_per_s", fit.rms_residual);
            doc.set("comb_fit.not_a_comb_warning", fit.not_a_comb);
            result.messages.push_back("omega_rep = " + format_double(fit.omega_rep) + " rad/s");
        } else if (cfg.command == "field") {
            const int degree = default_spectrum_degree(trap, temperature, cfg.modes_cap);
            const CombPolynomial poly = build_polynomial(cfg.n_mean, temperature, trap, degree);
            const ChemicalSpectrum spec = spectrum_from_roots(complex_roots(poly), temperature);
            const WeightModel model{};
            const FieldEnsemble ens = run_ensemble(spec, model, cfg.realizations, cfg.seed,
                                                   cfg.workers == 0 ? std::thread::hardware_concurrency()
                                                                    : cfg.workers);
            if (write_tables(cfg)) {
                CsvTable t;
                t.header = {"re_psi", "im_psi", "phase", "modulus"};
                for (const FieldSample& s : ens.samples)
                    t.add_row({s.psi.real(), s.psi.imag(), s.phase, s.modulus});
                writer.write(manifest, "field.csv", t.render());
                if (cfg.plot_scripts) {
                    writer.write(manifest, "plot_field.gp",
                                 gnuplot_header("field.png") +
                                     "set datafile separator ','\nset xlabel 'Re psi'\nset ylabel 'Im psi'\n"
                                     "plot 'field.csv' using 1:2 every ::1 with dots notitle\n");
                    plot_files.push_back("plot_field.gp");
                }
            }
            const double sem = std::sqrt((ens.var_re + ens.var_im) / static_cast<double>(ens.n));
            doc.set("field.n", ens.n);
            doc.set("field.spectrum_degree", degree);
            doc.set("field.mean_re", ens.mean.real());
            doc.set("field.mean_im", ens.mean.imag());
            doc.set("field.mean_abs", std::abs(ens.mean));
            doc.set("field.var_re", ens.var_re);
            doc.set("field.var_im", ens.var_im);
            doc.set("field.cov_re_im", ens.cov_re_im);
            doc.set("field.three_sigma_of_mean", 3.0 * sem);
            result.messages.push_back("|<psi>| = " + format_double(std::abs(ens.mean)));
        } else if (cfg.command == "comb") {
            const int degree = default_spectrum_degree(trap, temperature, cfg.modes_cap);
            const CombPolynomial poly = build_polynomial(cfg.n_mean, temperature, trap, degree);
            const ChemicalSpectrum spec = spectrum_from_roots(complex_roots(poly), temperature);
            const WeightModel model{};
            const FieldEnsemble ens = run_ensemble(spec, model, cfg.realizations, cfg.seed,
                                                   cfg.workers == 0 ? std::thread::hardware_concurrency()
                                                                    : cfg.workers);
            const FieldEnsemble kept = phase_filter(ens, cfg.phi0_rad, cfg.delta_rad);

            // One bin per comb tooth m*phi0 across (-pi, pi].
            const int k_max = static_cast<int>(std::floor(kPi / cfg.phi0_rad + 0.5));
            std::vector<double> edges;
            for (int m = -k_max; m <= k_max + 1; ++m) edges.push_back((m - 0.5) * cfg.phi0_rad);
            std::vector<double> phases;
            phases.reserve(kept.samples.size());
            for (const FieldSample& s : kept.samples) phases.push_back(s.phase);
            Histogram comb_hist;
            bool have_comb_hist = false;
            if (!phases.empty()) {
                comb_hist = make_histogram(phases, edges);
                have_comb_hist = true;
            }
            if (write_tables(cfg) && have_comb_hist) {
                CsvTable t;
                t.header = {"bin_lo", "bin_hi", "count"};
                for (std::size_t i = 0; i < comb_hist.counts.size(); ++i)
                    t.add_row({comb_hist.edges[i], comb_hist.edges[i + 1],
                               static_cast<double>(comb_hist.counts[i])});
                writer.write(manifest, "comb_hist.csv", t.render());
            }

            const CombFit fit = comb_fit(spec);
            CounterRng chain_rng(cfg.seed, 0x636F6D62ULL);  // distinct stream for the walk
            const RepetitionChain chain = metropolis_repetition(spec, fit, temperature, cfg.realizations,
                                                                cfg.realizations / 10, chain_rng);
            Histogram rep_hist;
            bool have_rep_hist = false;
            try {
                rep_hist = make_histogram(chain.omega_samples, auto_bin_count(chain.omega_samples));
                have_rep_hist = true;
            } catch (const DegenerateRangeError&) {
                // Frozen walk: every sample identical.
            }
            if (write_tables(cfg)) {
                CsvTable t;
                t.header = {"omega_rad_per_s", "freq_hz", "weight"};
                if (have_rep_hist) {
                    for (std::size_t i = 0; i < rep_hist.counts.size(); ++i) {
                        const double w = static_cast<double>(rep_hist.counts[i]) /
                                         static_cast<double>(rep_hist.total);
                        t.add_row({rep_hist.center(i), rep_hist.center(i) / kTwoPi, w});
                    }
                } else if (!chain.omega_samples.empty()) {
                    t.add_row({chain.omega_samples.front(), chain.omega_samples.front() / kTwoPi, 1.0});
                }
                writer.write(manifest, "rep_freq.csv", t.render());
                if (cfg.plot_scripts) {
                    writer.write(manifest, "plot_comb.gp",
                                 gnuplot_header("comb.png") +
                                     "set datafile separator ','\nset style fill solid\n"
                                     "plot 'comb_hist.csv' using (($1+$2)/2):3 every ::1 with boxes notitle\n");
                    writer.write(manifest, "plot_rep_freq.gp",
                                 gnuplot_header("rep_freq.png") +
                                     "set datafile separator ','\nset xlabel 'omega (rad/s)'\n"
                                     "plot 'rep_freq.csv' using 1:3 every ::1 with impulses notitle\n");
                    plot_files.push_back("plot_comb.gp");
                    plot_files.push_back("plot_rep_freq.gp");
                }
            }
            doc.set("comb.realizations", ens.n);
            doc.set("comb.kept_after_filter", kept.n);
            doc.set("comb.acceptance_fraction",
                    static_cast<double>(kept.n) / static_cast<double>(ens.n));
            if (have_comb_hist) {
                try {
                    const EnvelopeFit env = envelope_fit(comb_hist);
                    doc.set("comb.envelope.center_rad", env.center);
                    doc.set("comb.envelope.sigma_rad", env.sigma);
                    doc.set("comb.envelope.skewness", env.skewness);
                    doc.set("comb.envelope.goodness", env.goodness);
                } catch (const InsufficientDataError&) {
                    doc.set("comb.envelope.valid", false);
                }
            }
            doc.set("rep_freq.omega_rep_fit_rad_per_s", fit.omega_rep);
            doc.set("rep_freq.not_a_comb_warning", fit.not_a_comb);
            doc.set("rep_freq.chain_acceptance", chain.acceptance_rate);
            doc.set("rep_freq.frozen_chain_warning", chain.frozen_warning);
            if (have_rep_hist) {
                try {
                    const EnvelopeFit env = envelope_fit(rep_hist);
                    doc.set("rep_freq.envelope.center_rad_per_s", env.center);
                    doc.set("rep_freq.envelope.sigma_rad_per_s", env.sigma);
                    doc.set("rep_freq.envelope.skewness", env.skewness);
                    doc.set("rep_freq.envelope.goodness", env.goodness);
                } catch (const Error&) {
                    doc.set("rep_freq.envelope.valid", false);
                }
            } else {
                doc.set("rep_freq.envelope.valid", false);
            }
            const RepetitionRange range = repetition_range({chain}, trap);
            doc.set("rep_freq.omega_min_rad_per_s", range.min_omega);
            doc.set("rep_freq.omega_max_rad_per_s", range.max_omega);
            doc.set("rep_freq.min_over_trap_ratio", range.ratio_to_min_trap);
            result.messages.push_back("kept " + std::to_string(kept.n) + " of " + std::to_string(ens.n) +
                                      " realizations");
        } else if (cfg.command == "sweep-temp" || cfg.command == "sweep-trap") {
            SweepPlan plan;
            plan.n_mean = cfg.n_mean;
            plan.n_sigma = cfg.n_sigma;
            plan.realizations = cfg.realizations;
            plan.master_seed = cfg.seed;
            plan.phi0 = cfg.phi0_rad;
            plan.delta = cfg.delta_rad;
            plan.modes_cap = cfg.modes_cap;
            plan.workers = cfg.workers;
            for (double t : cfg.temp_grid_nk) plan.temperatures.push_back(t * 1e-9);

            std::vector<SweepRow> rows;
            if (cfg.command == "sweep-temp") {
                plan.traps = {trap};
                rows = temperature_sweep(plan);
            } else {
                for (double f : cfg.trap_grid_hz) plan.traps.push_back(TrapConfig::isotropic_hz(f));
                rows = trap_sweep(plan);
            }

            if (write_tables(cfg)) {
                writer.write(manifest, "sweep.csv", sweep_table(rows).render());
                if (cfg.command == "sweep-trap") {
                    CsvTable t;
                    t.header = {"temperature_nk", "trap_min_hz", "omega_rad_per_s", "freq_hz"};
                    for (const SweepRow& r : rows) {
                        if (r.error != ErrorCode::none) continue;
                        const std::size_t stride = std::max<std::size_t>(1, r.omega_samples.size() / 200);
                        for (std::size_t i = 0; i < r.omega_samples.size(); i += stride)
                            t.add_row({r.temperature * 1e9, r.trap.min_omega() / kTwoPi, r.omega_samples[i],
                                       r.omega_samples[i] / kTwoPi});
                    }
                    writer.write(manifest, "rep_scatter.csv", t.render());
                }
                if (cfg.plot_scripts) {
                    if (cfg.command == "sweep-temp") {
                        writer.write(manifest, "plot_sweep_temp.gp",
                                     gnuplot_header("sweep_temp.png") +
                                         "set datafile separator ','\nset xlabel 'T (nK)'\nset ylabel 'omega "
                                         "(rad/s)'\nplot 'sweep.csv' using 2:16 every ::1 with points notitle\n");
                        plot_files.push_back("plot_sweep_temp.gp");
                    } else {
                        writer.write(manifest, "plot_sweep_trap.gp",
                                     gnuplot_header("sweep_trap.png") +
                                         "set datafile separator ','\nset xlabel 'trap (Hz)'\nset ylabel 'omega "
                                         "(rad/s)'\nplot 'rep_scatter.csv' using 2:3 every ::1 with dots notitle\n");
                        plot_files.push_back("plot_sweep_trap.gp");
                    }
                }
            }

            summarize_rows(doc, rows);
            bool any_failed = false;
            for (const SweepRow& r : rows) any_failed = any_failed || r.error != ErrorCode::none;
            if (cfg.command == "sweep-temp") {
                std::vector<double> xs, ys;
                for (const SweepRow& r : rows) {
                    if (r.error != ErrorCode::none) continue;
                    xs.push_back(r.temperature * 1e9);
                    ys.push_back(r.omega_mean);
                }
                if (xs.size() >= 3) {
                    const LinearFit lf = linear_fit(xs, ys);
                    doc.set("trend.slope_rad_per_s_per_nk", lf.slope);
                    doc.set("trend.intercept_rad_per_s", lf.intercept);
                    doc.set("trend.r_squared", lf.r_squared);
                }
            }
            if (any_failed) result.exit_code = kExitPartialSweep;
            result.messages.push_back(std::to_string(rows.size()) + " sweep points done");
        } else {
            throw ConfigError("unknown command '" + cfg.command + "'");
        }

        if (write_summary(cfg)) writer.write(manifest, "summary.txt", doc.render());
        writer.write(manifest, "effective_config.json", config_to_json(cfg).dump(2) + "\n");
        writer.finalize(manifest);
        return result;
    } catch (const ConfigError& e) {
        result.exit_code = kExitConfig;
        result.messages.push_back(std::string("config error: ") + e.what());
    } catch (const Error& e) {
        result.exit_code = kExitNumerical;
        result.messages.push_back(std::string(error_code_name(e.code())) + " error: " + e.what());
        SummaryDoc err;
        err.set("error.code", std::string(error_code_name(e.code())));
        err.set("error.message", std::string(e.what()));
        try {
            writer.write(manifest, "error_report.txt", err.render());
            writer.finalize(manifest);
        } catch (const Error&) {
        }
    } catch (const std::exception& e) {
        result.exit_code = kExitNumerical;
        result.messages.push_back(std::string("error: ") + e.what());
    }
    return result;
}

}  // namespace atomcomb
