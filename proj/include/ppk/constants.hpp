#pragma once

#include <numbers>

namespace ppk {

// CODATA 2018 values. All internal frequencies are angular (rad/s);
// conversion to Hz happens only at file-format boundaries.
inline constexpr double hbar = 1.054571817e-34;        // J s
inline constexpr double elementary_charge = 1.602176634e-19; // C
inline constexpr double k_boltzmann = 1.380649e-23;    // J/K
inline constexpr double flux_quantum = 2.067833848e-15; // Wb, h/(2e)

inline constexpr double two_pi = 2.0 * std::numbers::pi;

// External interfaces quote ordinary frequencies.
inline constexpr double hz_to_rad(double f_hz) { return two_pi * f_hz; }
inline constexpr double rad_to_hz(double w_rad) { return w_rad / two_pi; }

} // namespace ppk
