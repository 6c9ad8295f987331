#pragma once

#include "ppk/types.hpp"

#include <vector>

namespace ppk {

// Instrument background estimated from off-resonance samples. The mask is
// true on the resonance region; at least 6 background samples are required
// on each side of it.
BackgroundModel fit_background(const std::vector<double>& omega,
                               const std::vector<cplx>& s11,
                               const std::vector<bool>& resonance_mask);

// forward-apply: ideal resonance -> measured trace
std::vector<cplx> apply_background(const BackgroundModel& bg,
                                   const std::vector<double>& omega,
                                   const std::vector<cplx>& s11_ideal);

// inverse: measured trace -> background-free resonance
std::vector<cplx> correct_background(const BackgroundModel& bg,
                                     const std::vector<double>& omega,
                                     const std::vector<cplx>& s11_measured);

// Driven Kerr reflection fit with {kappa, n_d} free. Multi-start over
// photon-number decades; absolute frequency grid.
struct KerrReflectionFixed {
    double omega0 = 0.0;
    double kappa_e = 0.0;
    double K = 0.0;
    double omega_d = 0.0;
};
FitResult fit_reflection_kerr(const std::vector<double>& omega,
                              const std::vector<cplx>& s11,
                              const KerrReflectionFixed& fixed);

// Thermal-occupation fit of a pumped output PSD with n_th_RF free; the
// operating point is fixed. Inverse-variance weights with a multiplicative
// noise model estimated from the off-peak scatter.
class PhotonPressureResponse;
FitResult fit_noise_spectrum(const std::vector<double>& Omega,
                             const std::vector<double>& psd,
                             const PhotonPressureResponse& resp,
                             const NoiseBaths& baths_fixed, double Gamma_e,
                             double Gamma_i);

// Interference-window fit of the single-quasi-mode reflection with
// {kappa1, kappa, g_eff, Omega0, Gamma0} free; the signal offset in the
// pump frame is fixed by the pump placement.
FitResult fit_effective_model(const std::vector<double>& Omega,
                              const std::vector<cplx>& s11,
                              double Omega_s_pump_frame);

} // namespace ppk
