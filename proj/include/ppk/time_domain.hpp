#pragma once

#include "ppk/types.hpp"

#include <cstddef>
#include <vector>

namespace ppk {

// one input tone; omega is absolute, S in sqrt(photon flux)
struct Tone {
    double omega = 0.0;
    double S = 0.0;
    double theta = 0.0;
    bool probe = false; // probes are excluded from the static-force reference
};

// Lab-derived integration setup. The cavity amplitude is integrated in a
// frame rotating at omega_ref with the convention
//   da/dt = [i (omega_c(n, phi) - omega_ref) - kappa/2] a
//           + i sqrt(kappa_e) sum_k S_k exp(i ((omega_k - omega_ref) t + theta_k))
//   omega_c = omega0 + K n + (G0 + G_K n) phi,   n = |a|^2
// and the flux mode (phi in Phi0 units, phi_zpf = Phi_zpf) obeys
//   d2phi/dt2 = -Omega0^2 phi - Gamma0 dphi/dt
//               - 2 Omega0 Phi_zpf (g0 n + (g_K / 2) n^2)
// with g0 = G0 Phi_zpf, g_K = G_K Phi_zpf. This choice reproduces the
// steady-state cubic and the reflection phase convention exactly.
struct TdParams {
    double omega_ref = 0.0;
    double omega0 = 0.0;
    double K = 0.0;
    double kappa = 0.0;
    double kappa_e = 0.0;
    double G0 = 0.0;    // rad/s per Phi0
    double G_K = 0.0;   // rad/s per Phi0 per photon
    double Phi_zpf = 0.0; // Phi0 units
    double Omega0 = 0.0;
    double Gamma0 = 0.0;
    bool coupled = false;          // evolve the flux mode
    bool subtract_static = true;   // remove the DC radiation force
    // drive-only <n>, <n^2> for the force subtraction; negative means
    // measure them internally with a probe-free pre-run
    double static_n_ref = -1.0;
    double static_n2_ref = -1.0;
    std::vector<Tone> tones;
    double t_settle = 0.0;
    double t_measure = 0.0;
    std::size_t n_samples = std::size_t(1) << 17;
    double abs_tol = 1e-9;
    double rel_tol = 1e-9;
    cplx a_init;
    double phi_init = 0.0;
    double dphi_init = 0.0;
};

// Fixed point of the cavity alone under the co-rotating tones
// (omega == omega_ref), by damped Newton from the photon-number hint.
cplx td_fixed_point(const TdParams& params, double n_hint);

// Integrate and record n_samples states over the measure window.
Trajectory integrate_cavity(const TdParams& params);

// Amplitude of exp(i Omega t) in the recorded cavity quadratures; exact
// for tones commensurate with the measure window.
cplx demodulate(const Trajectory& traj, double Omega);

struct TdReflection {
    std::vector<double> omega; // absolute probe frequencies
    std::vector<cplx> s11;
};

// Reflection by direct simulation: for each probe frequency, start at the
// drive-only fixed point, settle, measure, and demodulate at the probe.
// All tone offsets from omega_ref must be integer multiples of grid_df and
// t_measure is rounded to an integer number of grid periods.
TdReflection probe_response_td(const TdParams& base,
                               const std::vector<double>& probe_omega,
                               double S_probe, double grid_df, double n_hint);

} // namespace ppk
