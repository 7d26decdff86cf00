#pragma once

namespace atomcomb {

/// CODATA 2018 values, fixed at compile time.
struct PhysicalConstants {
    double hbar = 1.054571817e-34;  // reduced Planck constant, J*s
    double kB = 1.380649e-23;       // Boltzmann constant, J/K
};

inline constexpr double kHbar = 1.054571817e-34;
inline constexpr double kBoltzmann = 1.380649e-23;

// Apery's constant zeta(3), used in the harmonic-trap condensation formula.
inline constexpr double kZeta3 = 1.2020569031595943;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

}  // namespace atomcomb
