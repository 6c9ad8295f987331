#pragma once

#include "ppk/noise_spectra.hpp"
#include "ppk/types.hpp"

#include <vector>

namespace ppk {

struct SensingInputs {
    KerrSteadyState state;
    PumpFields pumps;
    QuasiModes qm;
    LinearizedCoupling coupling;
    double kappa = 0.0;
    double kappa_e = 0.0;
    double Phi_zpf = 0.0; // flux zero-point fluctuation, Phi0 units
    double Gamma0 = 0.0;
    double n_add = 0.0;
};

// Convert an output PSD in quanta on a pump-frame grid to a detected flux
// PSD in Phi0^2/Hz, along with the model imprecision floor.
SensingReport flux_spectral_density(const std::vector<double>& Omega,
                                    const std::vector<double>& S_nn,
                                    const SensingInputs& in);

// Model-only imprecision over a pump-frame grid (PSD = amplified vacuum).
SensingReport imprecision(const std::vector<double>& Omega,
                          const SensingInputs& in);

// Operating point of a drive sweep at fixed effective cooperativity.
struct DriveSweepEntry {
    double n_d = 0.0;
    double kappa = 0.0;
    double G_s = 0.0;
    double n_tilde_q = 0.0;
};

// On-resonance imprecision for each operating point, Phi0^2/Hz.
std::vector<double> imprecision_min_vs_drive(
    const std::vector<DriveSweepEntry>& points, double kappa_e, double C_eff,
    double n_add, double Phi_zpf, double Gamma0);

// S_imp_min / S_SQL over a (G_s, kappa_e/kappa) grid at fixed C_eff,
// indexed [i_G][j_ratio]. Uses n_tilde_q = G_s (G_s - 1).
std::vector<std::vector<double>> sql_landscape(
    const std::vector<double>& G_s_grid,
    const std::vector<double>& kappa_ratio_grid, double C_eff, double n_add);

} // namespace ppk
