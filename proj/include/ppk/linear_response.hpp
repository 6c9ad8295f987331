#pragma once

#include "ppk/types.hpp"

namespace ppk {

// Susceptibilities of the strongly driven Kerr cavity, linearized around the
// drive steady state. Frequencies are offsets from a reference tone at
// omega_ref (the drive for quantities in the drive frame, the pump for the
// coupled-system quantities); the image of a component at offset Omega under
// four-wave mixing with the drive sits at 2*Omega_dr - Omega, where
// Omega_dr = omega_d - omega_ref.
struct KerrResponse {
    double kappa = 0.0;
    double detune = 0.0;       // (omega_ref - omega0) - 2 K n_d, rad/s
    double Kn_d = 0.0;         // K * n_d, rad/s
    double two_Omega_dr = 0.0; // 2 (omega_d - omega_ref), rad/s

    cplx chi_p(double Omega) const {
        return 1.0 / cplx(0.5 * kappa, detune + Omega);
    }
    // chi_p^*(-Omega + 2 Omega_dr): the image-frequency factor.
    cplx chi_p_bar(double Omega) const {
        return std::conj(chi_p(two_Omega_dr - Omega));
    }
    cplx chi_g(double Omega) const {
        cplx p = chi_p(Omega);
        return p / (1.0 - Kn_d * Kn_d * p * chi_p_bar(Omega));
    }
    cplx chi_g_bar(double Omega) const {
        return std::conj(chi_g(two_Omega_dr - Omega));
    }

    static KerrResponse drive_frame(const KerrSteadyState& st, double kappa,
                                    double K);
    static KerrResponse pump_frame(const KerrSteadyState& st,
                                   const PumpFields& pumps, double kappa,
                                   double K);
};

// Drive-frame susceptibility chi_g(Omega) with
// chi_p^-1 = kappa/2 + i (Delta_d - 2 K n_d + Omega).
cplx driven_susceptibility(double Omega, const KerrSteadyState& st,
                           double kappa, double K);

// Full frequency-dependent gain prefactor,
// G(Omega) = [kappa/2 - i (Delta_d - 2 K n_d - Omega)] / (kappa + 2 i Omega);
// satisfies G(Omega) + G^*(-Omega) = 1.
cplx gain_prefactor(double Omega, const KerrSteadyState& st, double kappa,
                    double K);

// Classical response of the driven cavity to a weak pump tone at omega_p:
// 2x2 solve for (gamma_minus, gamma_plus). Solution residual is verified to
// 1e-10 relative.
PumpFields pump_fields(const KerrSteadyState& st, double omega_p, double S_p,
                       double kappa, double kappa_e, double omega0, double K);

// Quasi-mode decomposition around the drive. Throws solver_error in the
// degenerate regime (Delta_d - K n_d)(Delta_d - 3 K n_d) <= 0.
QuasiModes quasi_modes(const KerrSteadyState& st, double kappa, double kappa_e,
                       double omega0, double K);

// S11(Omega) = 1 - kappa_e chi_g(Omega), drive-frame offsets.
std::vector<cplx> reflection_bare(const std::vector<double>& Omega,
                                  const KerrSteadyState& st, double kappa,
                                  double kappa_e, double K);

// Two-mode approximation S11 = 1 - kappa1 chi_s - kappa2 chi_i.
std::vector<cplx> reflection_two_mode(const std::vector<double>& Omega,
                                      const QuasiModes& qm, double kappa);

struct OutputGains {
    cplx G_s_out_exact;
    cplx G_i_out_exact;
    double G_s_out_approx = 0.0; // 1 - (2 kappa_e/kappa) G_s
    double G_i_out_approx = 0.0;
};
OutputGains output_gain_on_resonance(const KerrSteadyState& st,
                                     const QuasiModes& qm, double kappa,
                                     double kappa_e);

} // namespace ppk
