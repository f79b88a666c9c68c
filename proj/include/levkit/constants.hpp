#pragma once

namespace levkit::constants {

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double two_pi = 2.0 * pi;

/// Vacuum permeability [T·m/A]
inline constexpr double mu0 = 4e-7 * pi;

/// Boltzmann constant [J/K]
inline constexpr double k_boltzmann = 1.380649e-23;

/// Standard gravity [m/s^2], exact by convention
inline constexpr double g_standard = 9.80665;

}  // namespace levkit::constants
