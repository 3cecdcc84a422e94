#pragma once

#include <numbers>

namespace flipkit::constants {

inline constexpr double pi = std::numbers::pi;

// CODATA 2018 (SI exact where defined), 9+ significant digits.
inline constexpr double speed_of_light = 299792458.0;         // m/s
inline constexpr double vacuum_permittivity = 8.8541878128e-12;  // F/m
inline constexpr double vacuum_permeability = 1.25663706212e-6;  // H/m
inline constexpr double elementary_charge = 1.602176634e-19;   // C
inline constexpr double planck = 6.62607015e-34;               // J s
inline constexpr double flux_quantum = 2.067833848e-15;        // Wb, h / 2e

}  // namespace flipkit::constants
