#pragma once

#include <numbers>

namespace nief::units {

// CODATA 2018, SI.
inline constexpr double c = 299792458.0;                 // m/s
inline constexpr double hbar = 1.054571817e-34;          // J s
inline constexpr double h = 6.62607015e-34;              // J s
inline constexpr double kB = 1.380649e-23;               // J/K
inline constexpr double eps0 = 8.8541878128e-12;         // F/m
inline constexpr double amu = 1.66053906660e-27;         // kg
inline constexpr double atm = 101325.0;                  // Pa
inline constexpr double debye = 3.33564095198152e-30;    // C m

inline constexpr double two_pi = 2.0 * std::numbers::pi;

// Angular frequency (rad/s) of a wavenumber given in cm^-1.
constexpr double wavenumber_to_angular(double per_cm) { return two_pi * c * 100.0 * per_cm; }
// Energy (J) of a wavenumber given in cm^-1.
constexpr double wavenumber_to_joule(double per_cm) { return h * c * 100.0 * per_cm; }
constexpr double hz_to_angular(double hz) { return two_pi * hz; }

} // namespace nief::units
