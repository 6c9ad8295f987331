#pragma once

#include "ppk/photon_pressure.hpp"
#include "ppk/types.hpp"

#include <vector>

namespace ppk {

// Output PSD in quanta of the driven Kerr cavity alone, drive-frame grid.
std::vector<double> bare_kerr_psd(const std::vector<double>& Omega,
                                  const KerrSteadyState& state, double kappa,
                                  double kappa_e, double K,
                                  const NoiseBaths& baths);

// Output PSD in quanta of the driven and pumped system, pump-frame grid.
std::vector<double> pp_output_psd(const std::vector<double>& Omega,
                                  const PhotonPressureResponse& resp,
                                  const NoiseBaths& baths, double Gamma_e,
                                  double Gamma_i);

// Single-quasi-mode approximation of the same PSD near the signal resonance.
std::vector<double> pp_output_psd_effective(const std::vector<double>& Omega,
                                            const PhotonPressureResponse& resp,
                                            const QuasiModes& qm,
                                            const NoiseBaths& baths,
                                            double Gamma_e, double Gamma_i);

// Amplified-vacuum occupation of the signal quasi-mode and its effective
// temperature, closed form.
struct QuantumNoiseOccupation {
    double n_tilde_q = 0.0; // signal-mode units
    double n_bar_q = 0.0;   // n_tilde_q / G_s
    double T_eff = 0.0;     // kelvin
};
QuantumNoiseOccupation effective_temperatures(const KerrSteadyState& state,
                                              const QuasiModes& qm,
                                              double kappa, double K);

// Mode occupations by numerical integration of the intracavity spectra.
// window_halfwidth <= 0 selects 20 max(kappa, Gamma0 (1 + C_eff)); the
// cavity-mode integral is always capped at the drive (Omega <= Omega_dp).
OccupationReport occupations_by_integration(const PhotonPressureResponse& resp,
                                            const QuasiModes& qm,
                                            const NoiseBaths& baths,
                                            double Gamma_e, double Gamma_i,
                                            double window_halfwidth = 0.0);

// Closed-form occupations for the two-mode rate picture.
OccupationReport occupations_analytic(double g_eff, double G_s, double kappa,
                                      double Gamma0, double n_th_RF,
                                      double n_th_HF, double n_tilde_q,
                                      double omega_s);

} // namespace ppk
