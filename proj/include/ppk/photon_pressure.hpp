#pragma once

#include "ppk/linear_response.hpp"
#include "ppk/types.hpp"

#include <vector>

namespace ppk {

// low-frequency mode parameters (rad/s)
struct RfMode {
    double Omega0 = 0.0;  // bare resonance
    double Gamma0 = 0.0;  // intrinsic linewidth
};

// Linearized coupling rates evaluated at a driven+pumped operating point.
// Sign convention: the drive phase is gauged onto the input, so alpha_d
// enters through |alpha_d| and g_alpha is real positive.
LinearizedCoupling linearized_couplings(const FluxPoint& flux,
                                        const KerrSteadyState& state,
                                        const PumpFields& pumps,
                                        const QuasiModes& qm,
                                        double kappa,
                                        double Gamma0);

// Frequency-resolved response of the pumped, driven system. All Omega
// arguments are offsets from the pump tone; the image of Omega under the
// pump is 2 Omega_dp - Omega.
class PhotonPressureResponse {
public:
    PhotonPressureResponse(const LinearizedCoupling& coupling,
                           const KerrSteadyState& state,
                           const PumpFields& pumps,
                           const RfMode& rf,
                           double kappa, double kappa_e);

    // bare mechanical-form susceptibility 1 / (Omega0^2 - W^2 + i W Gamma0)
    cplx chi0(double W) const;

    // pump-frame cavity susceptibilities
    cplx chi_p(double W) const { return kr_.chi_p(W); }
    cplx chi_g(double W) const { return kr_.chi_g(W); }
    cplx chi_g_bar(double W) const { return kr_.chi_g_bar(W); }
    cplx chi_p_bar(double W) const { return kr_.chi_p_bar(W); }

    // sideband-shifted shorthands: chi_{x,k}(W) = chi_x(W + k Omega_dp),
    // chibar_{x,k}(W) = conj(chi_x(k Omega_dp - W))
    cplx chi_p_k(double W, int k) const { return kr_.chi_p(W + k * Omega_dp_); }
    cplx chi_g_k(double W, int k) const { return kr_.chi_g(W + k * Omega_dp_); }
    cplx chi_p_bar_k(double W, int k) const {
        return std::conj(kr_.chi_p(k * Omega_dp_ - W));
    }
    cplx chi_g_bar_k(double W, int k) const {
        return std::conj(kr_.chi_g(k * Omega_dp_ - W));
    }

    // radiation backaction self-energies on the low-frequency mode
    cplx sigma_alpha(double W) const;
    cplx sigma_minus(double W) const;
    cplx sigma_plus(double W) const;
    cplx sigma_cross(double W) const;
    cplx sigma_total(double W) const;

    // dressed low-frequency susceptibilities
    cplx chi0_full(double W) const;      // mechanical form, with i 2 Omega0 Sigma
    cplx chi_plus_eff(double W) const;   // rotating-wave form, with Sigma added

    // cavity reflection, interaction-dressed (route A: backaction insertion)
    cplx reflection_insertion(double W) const;

    // cavity reflection via the dressed Kerr propagator (route B)
    cplx chi_om(double W) const;
    cplx chi_om_bar2(double W) const;    // conj(chi_om(2 Omega_dp - W))
    cplx pair_vertex_A(double W) const;
    cplx pair_vertex_B(double W) const;
    cplx chi_k(double W) const;
    cplx reflection_dressed(double W) const;

    const RfMode& rf() const { return rf_; }
    const KerrResponse& cavity() const { return kr_; }
    double kappa() const { return kappa_; }
    double kappa_e() const { return kappa_e_; }
    double Omega_dp() const { return Omega_dp_; }
    double Kn_d() const { return Kn_d_; }
    const LinearizedCoupling& coupling() const { return cpl_; }

private:
    KerrResponse kr_;
    RfMode rf_;
    LinearizedCoupling cpl_;
    double kappa_ = 0.0;
    double kappa_e_ = 0.0;
    double Omega_dp_ = 0.0;
    double Kn_d_ = 0.0;
    double g_alpha_sq_ = 0.0;   // real in the gauged convention
    cplx g_minus_;
    cplx g_plus_;
};

enum class ReflectionRoute { insertion, dressed };

// S11 over a pump-frame grid; both routes must agree to numerical noise.
std::vector<cplx> reflection_full(const std::vector<double>& Omega,
                                  const PhotonPressureResponse& resp,
                                  ReflectionRoute route);

// single-quasi-mode approximation near the signal resonance
std::vector<cplx> reflection_effective(const std::vector<double>& Omega,
                                       double kappa1, double kappa,
                                       double g_eff, const RfMode& rf,
                                       double Omega_s_pump_frame);

// pump-induced damping and spring shift from a complex Lorentzian fit to
// chi_plus_eff over +-5 effective widths around the dressed resonance
struct BackactionReport {
    double Gamma_eff = 0.0;   // fitted total width
    double Gamma_pp = 0.0;    // Gamma_eff - Gamma0
    double spring_shift = 0.0;
    double C_from_width = 0.0;  // Gamma_pp / Gamma0
    bool fit_converged = false;
};
BackactionReport backaction_self_energies(const PhotonPressureResponse& resp);

// cooperativity decomposition against undriven baselines at equal pump power
struct CooperativityBudget {
    double C_eff = 0.0;
    double C_undriven_same_tone = 0.0;     // pump left at the driven-case frequency
    double C_undriven_own_sideband = 0.0;  // pump moved to omega0 - Omega0
    double enhancement_same_tone = 0.0;
    double enhancement_own_sideband = 0.0;
    double factor_linewidth = 0.0;   // kappa_undriven / kappa
    double factor_coupling = 0.0;    // (g0_tilde / g0)^2
    double factor_field = 0.0;       // n_minus / n_minus(own sideband, undriven)
    double factor_gain = 0.0;        // G_s
};
CooperativityBudget cooperativity_budget(const FluxPoint& flux,
                                         const KerrSteadyState& state,
                                         const PumpFields& pumps,
                                         const QuasiModes& qm,
                                         const LinearizedCoupling& coupling,
                                         const RfMode& rf,
                                         double kappa, double kappa_e,
                                         double kappa_undriven,
                                         double S_p);

} // namespace ppk
