#pragma once

#include <numbers>

namespace lwdip::constants {

// CODATA 2018 exact/recommended values, SI units.
inline constexpr double pi = std::numbers::pi;
inline constexpr double c = 299'792'458.0;            // m/s
inline constexpr double eps0 = 8.8541878128e-12;      // F/m
inline constexpr double mu0 = 1.0 / (eps0 * c * c);   // H/m
inline constexpr double h = 6.626'070'15e-34;         // J s
inline constexpr double hbar = h / (2.0 * pi);        // J s
inline constexpr double e = 1.602'176'634e-19;        // C

// Charges may not exceed this speed anywhere in a simulation.
inline constexpr double max_charge_speed = c / 100.0;

// Observation points closer than this to a retarded source are rejected.
inline constexpr double exclusion_radius = 1e-15;     // m

} // namespace lwdip::constants
