#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "atomcomb/constants.hpp"
#include "atomcomb/core.hpp"
#include "atomcomb/errors.hpp"

namespace atomcomb {

enum class OutputFormat { table, summary, both };

inline const char* output_format_name(OutputFormat f) {
    switch (f) {
        case OutputFormat::table: return "table";
        case OutputFormat::summary: return "summary";
        case OutputFormat::both: return "both";
    }
    return "both";
}

inline OutputFormat parse_output_format(const std::string& s) {
    if (s == "table") return OutputFormat::table;
    if (s == "summary") return OutputFormat::summary;
    if (s == "both") return OutputFormat::both;
    throw ConfigError("format must be one of table|summary|both, got '" + s + "'");
}

struct RunConfig {
    std::string command = "field";
    std::uint64_t seed = 1;
    double temperature_nk = 10.0;
    double n_mean = 5000.0;
    double n_sigma = -1.0;  // < 0 selects sqrt(n_mean)
    std::array<double, 3> trap_hz = {125.0, 125.0, 125.0};
    double phi0_rad = kPi / 20.0;
    double delta_rad = kPi / 200.0;
    std::uint64_t realizations = 10000;
    int modes_cap = 500;
    std::vector<double> temp_grid_nk = {10.0, 25.0, 100.0};
    std::vector<double> trap_grid_hz = {10.0, 50.0, 125.0, 250.0};
    std::string out_dir = "out";
    OutputFormat format = OutputFormat::both;
    unsigned workers = 0;
    bool plot_scripts = false;

    friend bool operator==(const RunConfig&, const RunConfig&) = default;

    TrapConfig trap() const { return TrapConfig::from_hz(trap_hz[0], trap_hz[1], trap_hz[2]); }
    double temperature_kelvin() const { return temperature_nk * 1e-9; }

    /// Throws with the offending field name.
    void validate() const {
        if (!(temperature_nk > 0.0)) throw DomainError("temperature_nk must be > 0");
        if (!(n_mean >= 1.0)) throw DomainError("n_mean must be >= 1");
        if (!(trap_hz[0] > 0.0 && trap_hz[1] > 0.0 && trap_hz[2] > 0.0))
            throw DomainError("trap_hz components must be > 0");
        if (!(phi0_rad > 0.0 && phi0_rad <= kPi)) throw DomainError("phi0_rad must lie in (0, pi]");
        if (!(delta_rad > 0.0 && delta_rad <= 0.5 * phi0_rad))
            throw DomainError("delta_rad must lie in (0, phi0_rad/2]");
        if (realizations < 1) throw DomainError("realizations must be >= 1");
        if (modes_cap < 2) throw DomainError("modes_cap must be >= 2");
        if (temp_grid_nk.empty()) throw DomainError("temp_grid_nk must not be empty");
        for (std::size_t i = 0; i + 1 < temp_grid_nk.size(); ++i)
            if (!(temp_grid_nk[i] < temp_grid_nk[i + 1])) throw DomainError("temp_grid_nk must ascend");
        for (double t : temp_grid_nk)
            if (!(t > 0.0)) throw DomainError("temp_grid_nk entries must be > 0");
        if (trap_grid_hz.empty()) throw DomainError("trap_grid_hz must not be empty");
        for (std::size_t i = 0; i + 1 < trap_grid_hz.size(); ++i)
            if (!(trap_grid_hz[i] < trap_grid_hz[i + 1])) throw DomainError("trap_grid_hz must ascend");
        for (double f : trap_grid_hz)
            if (!(f > 0.0)) throw DomainError("trap_grid_hz entries must be > 0");
    }
};

inline nlohmann::ordered_json config_to_json(const RunConfig& cfg) {
    nlohmann::ordered_json j;
    j["command"] = cfg.command;
    j["seed"] = cfg.seed;
    j["temperature_nk"] = cfg.temperature_nk;
    j["n_mean"] = cfg.n_mean;
    j["n_sigma"] = cfg.n_sigma;
    j["trap_hz"] = cfg.trap_hz;
    j["phi0_rad"] = cfg.phi0_rad;
    j["delta_rad"] = cfg.delta_rad;
    j["realizations"] = cfg.realizations;
    j["modes_cap"] = cfg.modes_cap;
    j["temp_grid_nk"] = cfg.temp_grid_nk;
    j["trap_grid_hz"] = cfg.trap_grid_hz;
    j["out"] = cfg.out_dir;
    j["format"] = output_format_name(cfg.format);
    j["workers"] = cfg.workers;
    j["plot_scripts"] = cfg.plot_scripts;
    return j;
}

/// Applies a JSON object onto cfg. Unknown keys are a hard error listing
/// every offender.
inline void apply_config_json(RunConfig& cfg, const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("config root must be a JSON object");
    static const std::set<std::string> known = {
        "command", "seed", "temperature_nk", "n_mean", "n_sigma", "trap_hz", "phi0_rad", "delta_rad",
        "realizations", "modes_cap", "temp_grid_nk", "trap_grid_hz", "out", "format", "workers",
        "plot_scripts"};
    std::vector<std::string> unknown;
    for (const auto& [key, value] : j.items())
        if (!known.count(key)) unknown.push_back(key);
    if (!unknown.empty()) {
        std::string msg = "unknown config keys:";
        for (const std::string& k : unknown) msg += " '" + k + "'";
        throw ConfigError(msg);
    }

    try {
        if (j.contains("command")) cfg.command = j.at("command").get<std::string>();
        if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("temperature_nk")) cfg.temperature_nk = j.at("temperature_nk").get<double>();
        if (j.contains("n_mean")) cfg.n_mean = j.at("n_mean").get<double>();
        if (j.contains("n_sigma")) cfg.n_sigma = j.at("n_sigma").get<double>();
        if (j.contains("trap_hz")) {
            const auto v = j.at("trap_hz").get<std::vector<double>>();
            if (v.size() != 3) throw ConfigError("trap_hz must have exactly 3 components");
            cfg.trap_hz = {v[0], v[1], v[2]};
        }
        if (j.contains("phi0_rad")) cfg.phi0_rad = j.at("phi0_rad").get<double>();
        if (j.contains("delta_rad")) cfg.delta_rad = j.at("delta_rad").get<double>();
        if (j.contains("realizations")) cfg.realizations = j.at("realizations").get<std::uint64_t>();
        if (j.contains("modes_cap")) cfg.modes_cap = j.at("modes_cap").get<int>();
        if (j.contains("temp_grid_nk")) cfg.temp_grid_nk = j.at("temp_grid_nk").get<std::vector<double>>();
        if (j.contains("trap_grid_hz")) cfg.trap_grid_hz = j.at("trap_grid_hz").get<std::vector<double>>();
        if (j.contains("out")) cfg.out_dir = j.at("out").get<std::string>();
        if (j.contains("format")) cfg.format = parse_output_format(j.at("format").get<std::string>());
        if (j.contains("workers")) cfg.workers = j.at("workers").get<unsigned>();
        if (j.contains("plot_scripts")) cfg.plot_scripts = j.at("plot_scripts").get<bool>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed config value: ") + e.what());
    }
}

inline RunConfig parse_config_file(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config file " + path.string());
    nlohmann::json j;
    try {
        is >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config file " + path.string() + " is not valid JSON: " + e.what());
    }
    RunConfig cfg;
    apply_config_json(cfg, j);
    return cfg;
}

}  // namespace atomcomb
