#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "atomcomb/config.hpp"
#include "atomcomb/pipeline.hpp"
#include "atomcomb/version.hpp"

namespace {

struct CliValues {
    std::string config_path;
    std::uint64_t seed = 0;
    double temperature_nk = 0.0;
    double n_mean = 0.0;
    double n_sigma = 0.0;
    std::vector<double> trap_hz;
    double phi0_rad = 0.0;
    double delta_rad = 0.0;
    std::uint64_t realizations = 0;
    int modes_cap = 0;
    std::vector<double> temp_grid_nk;
    std::vector<double> trap_grid_hz;
    std::string out_dir;
    std::string format;
    unsigned workers = 0;
    bool plot_scripts = false;
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"atomcomb " + std::string(atomcomb::kVersion) +
                 " - Monte-Carlo frequency-comb spectra of a trapped ideal Bose gas"};
    app.name("atomcomb");
    app.require_subcommand(1);

    CliValues v;
    app.add_option("--config", v.config_path, "JSON configuration file; flags override its values");
    app.add_option("--seed", v.seed, "Master random seed (default 1)");
    app.add_option("--temperature-nk", v.temperature_nk, "Temperature in nanokelvin (default 10)");
    app.add_option("--n-mean", v.n_mean, "Mean total atom number (default 5000)");
    app.add_option("--n-sigma", v.n_sigma,
                   "Width of the Gaussian atom-number draw; negative selects sqrt(n_mean) (default -1)");
    app.add_option("--trap-hz", v.trap_hz, "Trap frequencies FX,FY,FZ in Hz (default 125,125,125)")
        ->delimiter(',')
        ->expected(1, 3);
    app.add_option("--phi0-rad", v.phi0_rad, "Comb unit phase in rad (default pi/20)");
    app.add_option("--delta-rad", v.delta_rad, "Phase filter half-width in rad (default pi/200)");
    app.add_option("--realizations", v.realizations, "Monte-Carlo realizations per run (default 10000)");
    app.add_option("--modes-cap", v.modes_cap, "Cap on the spectrum polynomial degree (default 500)");
    app.add_option("--temp-grid-nk", v.temp_grid_nk, "Temperature grid in nK for sweeps (default 10,25,100)")
        ->delimiter(',');
    app.add_option("--trap-grid-hz", v.trap_grid_hz,
                   "Isotropic trap grid in Hz for sweep-trap (default 10,50,125,250)")
        ->delimiter(',');
    app.add_option("--out", v.out_dir, "Output directory (default out)");
    app.add_option("--format", v.format, "Output selection: table|summary|both (default both)")
        ->check(CLI::IsMember({"table", "summary", "both"}));
    app.add_option("--workers", v.workers, "Worker threads; 0 selects hardware concurrency (default 0)");
    app.add_flag("--plot-scripts", v.plot_scripts, "Also emit gnuplot scripts next to the tables");

    app.add_subcommand("tc", "Critical temperature of the configured trap and atom number")->fallthrough();
    app.add_subcommand("solve", "Solve the particle-number relation for the fugacity")->fallthrough();
    app.add_subcommand("spectrum", "Complex chemical-potential spectrum and comb fit")->fallthrough();
    app.add_subcommand("field", "Sample the thermal atom-laser field (complex plane cloud)")->fallthrough();
    app.add_subcommand("comb", "Phase-filtered comb histogram and repetition-frequency distribution")
        ->fallthrough();
    app.add_subcommand("sweep-temp", "Temperature sweep of the repetition frequency")->fallthrough();
    app.add_subcommand("sweep-trap", "Trap-frequency sweep of the repetition-frequency distribution")
        ->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return atomcomb::kExitConfig;
    }

    atomcomb::RunConfig cfg;
    try {
        if (app.count("--config") > 0) cfg = atomcomb::parse_config_file(v.config_path);
        if (app.count("--seed") > 0) cfg.seed = v.seed;
        if (app.count("--temperature-nk") > 0) cfg.temperature_nk = v.temperature_nk;
        if (app.count("--n-mean") > 0) cfg.n_mean = v.n_mean;
        if (app.count("--n-sigma") > 0) cfg.n_sigma = v.n_sigma;
        if (app.count("--trap-hz") > 0) {
            if (v.trap_hz.size() == 1)
                cfg.trap_hz = {v.trap_hz[0], v.trap_hz[0], v.trap_hz[0]};
            else if (v.trap_hz.size() == 3)
                cfg.trap_hz = {v.trap_hz[0], v.trap_hz[1], v.trap_hz[2]};
            else
                throw atomcomb::ConfigError("--trap-hz takes 1 or 3 comma-separated values");
        }
        if (app.count("--phi0-rad") > 0) cfg.phi0_rad = v.phi0_rad;
        if (app.count("--delta-rad") > 0) cfg.delta_rad = v.delta_rad;
        if (app.count("--realizations") > 0) cfg.realizations = v.realizations;
        if (app.count("--modes-cap") > 0) cfg.modes_cap = v.modes_cap;
        if (app.count("--temp-grid-nk") > 0) cfg.temp_grid_nk = v.temp_grid_nk;
        if (app.count("--trap-grid-hz") > 0) cfg.trap_grid_hz = v.trap_grid_hz;
        if (app.count("--out") > 0) cfg.out_dir = v.out_dir;
        if (app.count("--format") > 0) cfg.format = atomcomb::parse_output_format(v.format);
        if (app.count("--workers") > 0) cfg.workers = v.workers;
        if (v.plot_scripts) cfg.plot_scripts = true;
        cfg.command = app.get_subcommands().front()->get_name();
        cfg.validate();
    } catch (const atomcomb::Error& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return atomcomb::kExitConfig;
    }

    const atomcomb::PipelineResult result = atomcomb::run_pipeline(cfg);
    for (const std::string& msg : result.messages) std::cout << msg << '\n';
    if (result.exit_code == atomcomb::kExitOk)
        std::cout << "outputs written to " << cfg.out_dir << '\n';
    return result.exit_code;
}
