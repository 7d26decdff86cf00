#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "atomcomb/constants.hpp"
#include "atomcomb/errors.hpp"

namespace atomcomb {

/// Harmonic trap angular frequencies (rad/s), all strictly positive.
struct TrapConfig {
    double omega_x = 0.0;
    double omega_y = 0.0;
    double omega_z = 0.0;

    TrapConfig() = default;
    TrapConfig(double wx, double wy, double wz) : omega_x(wx), omega_y(wy), omega_z(wz) {
        if (!(wx > 0.0 && wy > 0.0 && wz > 0.0))
            throw DomainError("trap frequencies must be strictly positive");
    }

    static TrapConfig isotropic_hz(double f) { return TrapConfig(kTwoPi * f, kTwoPi * f, kTwoPi * f); }
    static TrapConfig from_hz(double fx, double fy, double fz) {
        return TrapConfig(kTwoPi * fx, kTwoPi * fy, kTwoPi * fz);
    }

    std::array<double, 3> axes() const { return {omega_x, omega_y, omega_z}; }

    double min_omega() const { return std::min({omega_x, omega_y, omega_z}); }
    double max_omega() const { return std::max({omega_x, omega_y, omega_z}); }
    double sum_omega() const { return omega_x + omega_y + omega_z; }
    double geometric_mean() const { return std::cbrt(omega_x * omega_y * omega_z); }

    bool isotropic(double rel_tol = 1e-12) const {
        const double w0 = omega_x;
        return std::abs(omega_y - w0) <= rel_tol * w0 && std::abs(omega_z - w0) <= rel_tol * w0;
    }
};

/// Gas ensemble parameters. n_sigma is the width of the Gaussian total
/// particle-number draw (0 disables the fluctuation).
struct GasParams {
    double n_mean = 0.0;
    double temperature = 0.0;  // K
    double n_sigma = 0.0;

    GasParams() = default;
    GasParams(double n, double t_kelvin, double sigma) : n_mean(n), temperature(t_kelvin), n_sigma(sigma) {
        if (!(n >= 1.0)) throw DomainError("n_mean must be >= 1");
        if (!(t_kelvin > 0.0)) throw DomainError("temperature must be > 0");
        if (!(sigma >= 0.0)) throw DomainError("n_sigma must be >= 0");
    }
};

struct ModeIndex {
    int kx = 0;
    int ky = 0;
    int kz = 0;

    friend bool operator==(const ModeIndex&, const ModeIndex&) = default;
    friend auto operator<=>(const ModeIndex&, const ModeIndex&) = default;
};

struct ModeEntry {
    ModeIndex index;
    double energy = 0.0;  // J
};

/// Ordered lattice of single-particle energies hbar*(k.omega), ascending,
/// ties broken lexicographically by (kx, ky, kz).
struct ModeSpectrum {
    std::vector<ModeEntry> entries;
    double cutoff = 0.0;  // J
    bool includes_ground = false;

    std::size_t size() const { return entries.size(); }
};

/// Inverse temperature and the coherence time tau = beta*hbar.
struct ThermalScales {
    double beta = 0.0;  // 1/J
    double tau = 0.0;   // s
    std::optional<std::array<double, 3>> beta_hbar_omega;  // per-axis, dimensionless
};

inline double mode_energy(const TrapConfig& trap, const ModeIndex& k) {
    return kHbar * (k.kx * trap.omega_x + k.ky * trap.omega_y + k.kz * trap.omega_z);
}

/// Counts lattice points with energy <= cutoff (ground state excluded).
/// Early-exits once the count reaches `stop_after`, so callers that only
/// need min(count, cap) stay cheap for dense lattices.
inline std::uint64_t mode_count_below(const TrapConfig& trap, double cutoff_joule,
                                      std::uint64_t stop_after = std::numeric_limits<std::uint64_t>::max()) {
    if (!(cutoff_joule > 0.0)) throw DomainError("cutoff must be > 0");
    const double ex = kHbar * trap.omega_x;
    const double ey = kHbar * trap.omega_y;
    const double ez = kHbar * trap.omega_z;
    std::uint64_t count = 0;
    for (std::int64_t kx = 0;; ++kx) {
        const double exx = static_cast<double>(kx) * ex;
        if (exx > cutoff_joule) break;
        for (std::int64_t ky = 0;; ++ky) {
            const double exy = exx + static_cast<double>(ky) * ey;
            if (exy > cutoff_joule) break;
            count += static_cast<std::uint64_t>(std::floor((cutoff_joule - exy) / ez)) + 1;
            if (count > stop_after) return count - 1;  // ground removed below anyway
        }
    }
    return count - 1;  // remove k = (0,0,0)
}

/// Enumerates every lattice mode with energy <= cutoff. The ground state is
/// kept only when include_ground is set.
inline ModeSpectrum mode_energies(const TrapConfig& trap, double cutoff_joule, bool include_ground) {
    if (!(cutoff_joule > 0.0)) throw DomainError("cutoff must be > 0");
    constexpr std::uint64_t kEnumerationLimit = 20'000'000;
    const std::uint64_t n = mode_count_below(trap, cutoff_joule, kEnumerationLimit);
    if (n >= kEnumerationLimit)
        throw DomainError("mode lattice too large to enumerate (" + std::to_string(n) + "+ modes)");

    ModeSpectrum spec;
    spec.cutoff = cutoff_joule;
    spec.includes_ground = include_ground;
    spec.entries.reserve(n + 1);

    for (int kx = 0;; ++kx) {
        if (mode_energy(trap, {kx, 0, 0}) > cutoff_joule) break;
        for (int ky = 0;; ++ky) {
            if (mode_energy(trap, {kx, ky, 0}) > cutoff_joule) break;
            for (int kz = 0;; ++kz) {
                const double e = mode_energy(trap, {kx, ky, kz});
                if (e > cutoff_joule) break;
                if (kx == 0 && ky == 0 && kz == 0 && !include_ground) continue;
                spec.entries.push_back({{kx, ky, kz}, e});
            }
        }
    }
    if (spec.entries.empty())
        throw EmptySpectrumError("cutoff admits no modes");

    std::sort(spec.entries.begin(), spec.entries.end(), [](const ModeEntry& a, const ModeEntry& b) {
        if (a.energy != b.energy) return a.energy < b.energy;
        return a.index < b.index;
    });
    return spec;
}

inline ThermalScales thermal_scales(double temperature_kelvin) {
    if (!(temperature_kelvin > 0.0)) throw DomainError("temperature must be > 0");
    ThermalScales s;
    s.beta = 1.0 / (kBoltzmann * temperature_kelvin);
    s.tau = s.beta * kHbar;
    return s;
}

inline ThermalScales thermal_scales(double temperature_kelvin, const TrapConfig& trap) {
    ThermalScales s = thermal_scales(temperature_kelvin);
    const double bh = s.tau;  // beta*hbar
    s.beta_hbar_omega = {bh * trap.omega_x, bh * trap.omega_y, bh * trap.omega_z};
    return s;
}

inline double nanokelvin(double nk) { return nk * 1e-9; }

}  // namespace atomcomb
