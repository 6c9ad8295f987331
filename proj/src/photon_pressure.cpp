#include "ppk/photon_pressure.hpp"

#include "ppk/optimize.hpp"

#include <cmath>

namespace ppk {

LinearizedCoupling linearized_couplings(const FluxPoint& flux,
                                        const KerrSteadyState& state,
                                        const PumpFields& pumps,
                                        const QuasiModes& qm,
                                        double kappa,
                                        double Gamma0) {
    if (state.n_d < 0.0)
        throw validation_error("linearized_couplings: n_d must be non-negative");
    LinearizedCoupling c;
    c.g0_tilde = flux.g0 + 2.0 * flux.g_K * state.n_d;
    // G_tilde Phi_zpf = -(g0 + 2 g_K n_d), G_prime Phi_zpf = -(g0 + g_K n_d)
    c.g_minus = -pumps.gamma_minus * c.g0_tilde;
    c.g_plus = -pumps.gamma_plus * c.g0_tilde;
    c.g_alpha = -std::sqrt(state.n_d) * (flux.g0 + flux.g_K * state.n_d);
    c.g_eff = std::sqrt(qm.G_s * pumps.n_minus) * std::abs(c.g0_tilde);
    c.C_eff = 4.0 * c.g_eff * c.g_eff / (kappa * Gamma0);
    c.K = flux.K;
    return c;
}

PhotonPressureResponse::PhotonPressureResponse(const LinearizedCoupling& coupling,
                                               const KerrSteadyState& state,
                                               const PumpFields& pumps,
                                               const RfMode& rf,
                                               double kappa, double kappa_e)
    : kr_(KerrResponse::pump_frame(state, pumps, kappa, coupling.K)),
      rf_(rf),
      cpl_(coupling),
      kappa_(kappa),
      kappa_e_(kappa_e),
      Omega_dp_(pumps.Omega_dp),
      Kn_d_(coupling.K * state.n_d),
      g_alpha_sq_(std::norm(coupling.g_alpha)),
      g_minus_(coupling.g_minus),
      g_plus_(coupling.g_plus) {
    if (rf.Omega0 <= 0.0 || rf.Gamma0 <= 0.0)
        throw validation_error("PhotonPressureResponse: Omega0 and Gamma0 must be positive");
}

cplx PhotonPressureResponse::chi0(double W) const {
    return 1.0 / cplx(rf_.Omega0 * rf_.Omega0 - W * W, W * rf_.Gamma0);
}

cplx PhotonPressureResponse::sigma_alpha(double W) const {
    const cplx iKn(0.0, Kn_d_);
    return g_alpha_sq_ *
           (chi_g_k(W, 1) * (1.0 - iKn * chi_p_bar_k(W, 1)) -
            chi_g_bar_k(W, 1) * (1.0 + iKn * chi_p_k(W, 1)));
}

cplx PhotonPressureResponse::sigma_minus(double W) const {
    return std::norm(g_minus_) * (chi_g_k(W, 0) - chi_g_bar_k(W, 0));
}

cplx PhotonPressureResponse::sigma_plus(double W) const {
    return std::norm(g_plus_) * (chi_g_k(W, 2) - chi_g_bar_k(W, 2));
}

cplx PhotonPressureResponse::sigma_cross(double W) const {
    const cplx iKn(0.0, Kn_d_);
    const double pair = 2.0 * (g_minus_ * g_plus_).real(); // g-g+ + c.c.
    return -iKn * pair *
           (chi_g_k(W, 0) * chi_p_bar_k(W, 2) + chi_g_bar_k(W, 0) * chi_p_k(W, 2));
}

cplx PhotonPressureResponse::sigma_total(double W) const {
    return sigma_alpha(W) + sigma_minus(W) + sigma_plus(W) + sigma_cross(W);
}

cplx PhotonPressureResponse::chi0_full(double W) const {
    return 1.0 / (cplx(rf_.Omega0 * rf_.Omega0 - W * W, W * rf_.Gamma0) +
                  cplx(0.0, 2.0 * rf_.Omega0) * sigma_total(W));
}

cplx PhotonPressureResponse::chi_plus_eff(double W) const {
    return 1.0 / (cplx(0.5 * rf_.Gamma0, W - rf_.Omega0) + sigma_total(W));
}

cplx PhotonPressureResponse::reflection_insertion(double W) const {
    const cplx iKn(0.0, Kn_d_);
    const cplx cg = chi_g_k(W, 0);
    const cplx pbar2 = chi_p_bar_k(W, 2);
    const cplx b1 = std::conj(g_minus_) - iKn * g_plus_ * pbar2;
    const cplx b2 = g_minus_ - iKn * std::conj(g_plus_) * pbar2;
    const cplx i2W0(0.0, 2.0 * rf_.Omega0);
    return 1.0 - kappa_e_ * cg * (1.0 - i2W0 * cg * chi0_full(W) * b1 * b2);
}

cplx PhotonPressureResponse::chi_om(double W) const {
    const cplx cp = chi_p(W);
    const cplx load = std::norm(g_minus_) * chi0(W) +
                      g_alpha_sq_ * chi0(W - Omega_dp_) +
                      std::norm(g_plus_) * chi0(W - 2.0 * Omega_dp_);
    const cplx i2W0(0.0, 2.0 * rf_.Omega0);
    return cp / (1.0 + i2W0 * load * cp);
}

cplx PhotonPressureResponse::chi_om_bar2(double W) const {
    return std::conj(chi_om(2.0 * Omega_dp_ - W));
}

cplx PhotonPressureResponse::pair_vertex_A(double W) const {
    const cplx pair = g_plus_ * g_minus_;
    return Kn_d_ - 2.0 * rf_.Omega0 * g_alpha_sq_ * chi0(W - Omega_dp_) -
           2.0 * rf_.Omega0 * pair * (chi0(W) + chi0(W - 2.0 * Omega_dp_));
}

cplx PhotonPressureResponse::pair_vertex_B(double W) const {
    const cplx pair = std::conj(g_plus_ * g_minus_);
    return Kn_d_ - 2.0 * rf_.Omega0 * g_alpha_sq_ * chi0(W - Omega_dp_) -
           2.0 * rf_.Omega0 * pair * (chi0(W) + chi0(W - 2.0 * Omega_dp_));
}

cplx PhotonPressureResponse::chi_k(double W) const {
    const cplx om = chi_om(W);
    return om / (1.0 - pair_vertex_A(W) * pair_vertex_B(W) * om * chi_om_bar2(W));
}

cplx PhotonPressureResponse::reflection_dressed(double W) const {
    return 1.0 - kappa_e_ * chi_k(W);
}

std::vector<cplx> reflection_full(const std::vector<double>& Omega,
                                  const PhotonPressureResponse& resp,
                                  ReflectionRoute route) {
    std::vector<cplx> s11(Omega.size());
    for (std::size_t i = 0; i < Omega.size(); ++i)
        s11[i] = (route == ReflectionRoute::insertion)
                     ? resp.reflection_insertion(Omega[i])
                     : resp.reflection_dressed(Omega[i]);
    return s11;
}

std::vector<cplx> reflection_effective(const std::vector<double>& Omega,
                                       double kappa1, double kappa,
                                       double g_eff, const RfMode& rf,
                                       double Omega_s_pump_frame) {
    std::vector<cplx> s11(Omega.size());
    const cplx i2W0(0.0, 2.0 * rf.Omega0);
    const double g2 = g_eff * g_eff;
    for (std::size_t i = 0; i < Omega.size(); ++i) {
        const double W = Omega[i];
        const cplx chi_s = 1.0 / cplx(0.5 * kappa, W - Omega_s_pump_frame);
        const cplx chi0_eff =
            1.0 / (cplx(rf.Omega0 * rf.Omega0 - W * W, W * rf.Gamma0) +
                   i2W0 * g2 * chi_s);
        s11[i] = 1.0 - kappa1 * chi_s * (1.0 - i2W0 * g2 * chi_s * chi0_eff);
    }
    return s11;
}

BackactionReport backaction_self_energies(const PhotonPressureResponse& resp) {
    const RfMode& rf = resp.rf();
    const double C_est = std::max(resp.coupling().C_eff, 0.0);
    const double width0 = rf.Gamma0 * (1.0 + C_est);

    // locate the dressed peak before fitting; backaction shifts it
    double center = rf.Omega0;
    double best = 0.0;
    const int n_scan = 481;
    for (int i = 0; i < n_scan; ++i) {
        const double W =
            rf.Omega0 + width0 * (-6.0 + 12.0 * i / double(n_scan - 1));
        const double a = std::abs(resp.chi_plus_eff(W));
        if (a > best) {
            best = a;
            center = W;
        }
    }

    std::vector<double> W(241);
    std::vector<cplx> chi(W.size());
    for (std::size_t i = 0; i < W.size(); ++i) {
        W[i] = center + width0 * (-5.0 + 10.0 * double(i) / double(W.size() - 1));
        chi[i] = resp.chi_plus_eff(W[i]);
    }
    const LorentzianPole pole = fit_complex_lorentzian(W, chi, center, width0);

    BackactionReport rep;
    rep.Gamma_eff = pole.width;
    rep.Gamma_pp = pole.width - rf.Gamma0;
    rep.spring_shift = pole.center - rf.Omega0;
    rep.C_from_width = rep.Gamma_pp / rf.Gamma0;
    rep.fit_converged = pole.converged;
    return rep;
}

CooperativityBudget cooperativity_budget(const FluxPoint& flux,
                                         const KerrSteadyState& state,
                                         const PumpFields& pumps,
                                         const QuasiModes& qm,
                                         const LinearizedCoupling& coupling,
                                         const RfMode& rf,
                                         double kappa, double kappa_e,
                                         double kappa_undriven,
                                         double S_p) {
    (void)state;
    KerrSteadyState undriven;
    undriven.n_d = 0.0;
    undriven.Delta_d = 0.0;
    undriven.branch = Branch::low;

    const PumpFields same_tone = pump_fields(undriven, pumps.omega_p, S_p,
                                             kappa_undriven, kappa_e,
                                             flux.omega0, flux.K);
    const PumpFields own_sideband =
        pump_fields(undriven, flux.omega0 - rf.Omega0, S_p, kappa_undriven,
                    kappa_e, flux.omega0, flux.K);

    const double g0_sq = flux.g0 * flux.g0;
    CooperativityBudget b;
    b.C_eff = coupling.C_eff;
    b.C_undriven_same_tone =
        4.0 * same_tone.n_minus * g0_sq / (kappa_undriven * rf.Gamma0);
    b.C_undriven_own_sideband =
        4.0 * own_sideband.n_minus * g0_sq / (kappa_undriven * rf.Gamma0);
    b.enhancement_same_tone = b.C_eff / b.C_undriven_same_tone;
    b.enhancement_own_sideband = b.C_eff / b.C_undriven_own_sideband;
    b.factor_linewidth = kappa_undriven / kappa;
    b.factor_coupling = (coupling.g0_tilde / flux.g0) *
                        (coupling.g0_tilde / flux.g0);
    b.factor_field = pumps.n_minus / own_sideband.n_minus;
    b.factor_gain = qm.G_s;
    return b;
}

} // namespace ppk
