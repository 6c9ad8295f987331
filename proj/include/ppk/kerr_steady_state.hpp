#pragma once

#include "ppk/types.hpp"

#include <functional>
#include <optional>

namespace ppk {

// All real, non-negative photon-number roots of
//   K^2 n^3 - 2 K Delta_d n^2 + (Delta_d^2 + kappa^2/4) n = kappa_e S_d^2,
// ascending, with branch labels. Each root satisfies the cubic with relative
// residual below 1e-9. |K| -> 0 falls back to the linear formula.
std::vector<KerrSteadyState> steady_states(const DriveConfig& drive,
                                           const FluxPoint& flux,
                                           double kappa, double kappa_e);

enum class SweepDirection { up, down };

// Picks the physical root: nearest stable root to the history point if one
// is given, else lowest (up) / highest (down) stable root. Never returns the
// middle branch.
KerrSteadyState select_branch(const std::vector<KerrSteadyState>& roots,
                              std::optional<double> history_nd,
                              SweepDirection direction);

struct SweepPoint {
    FluxPoint flux;
    KerrSteadyState state;
    double kappa_eff = 0.0;   // self-consistent total linewidth, rad/s
    bool converged = false;   // fixed point reached
    std::string failure;      // non-empty when this point failed
};

// kappa(n_d) model used by sweeps: kappa_e + kappa_i_residual + TLS term.
struct LinewidthModel {
    double kappa_e = 0.0;
    double kappa_i_residual = 0.0; // non-TLS internal loss, rad/s
    double kappa_tls0 = 0.0;       // unsaturated TLS linewidth, rad/s
    TlsParams tls;

    double kappa_of(double n_d) const;
};

// Hysteretic flux sweep at fixed drive. Per point, kappa and n_d are solved
// self-consistently (damped fixed point, relative tolerance 1e-6, at most
// 200 iterations). Failures are recorded and the sweep continues.
std::vector<SweepPoint> sweep_flux(const DriveConfig& drive,
                                   const std::vector<double>& phi_b_grid,
                                   SweepDirection direction,
                                   const CircuitParams& circuit,
                                   const LinewidthModel& lw);

// Inverse problem: drive amplitude that places n_d = target on the given
// detuning. S_d^2 = n [ (K n - Delta_d)^2 + kappa^2/4 ] / kappa_e.
// Throws validation_error for non-positive targets; flags targets that land
// on the middle branch via the returned state.
struct DriveCalibration {
    DriveConfig drive;
    KerrSteadyState state;      // forward-solved state nearest the target
    bool on_requested_branch = false;
};
DriveCalibration drive_for_target_nd(double target_nd, const FluxPoint& flux,
                                     double kappa, double kappa_e,
                                     double Delta_d, Branch requested);

} // namespace ppk
