#include "ppk/linear_response.hpp"

#include <cmath>
#include <sstream>

namespace ppk {

KerrResponse KerrResponse::drive_frame(const KerrSteadyState& st, double kappa,
                                       double K) {
    KerrResponse r;
    r.kappa = kappa;
    r.detune = st.Delta_d - 2.0 * K * st.n_d;
    r.Kn_d = K * st.n_d;
    r.two_Omega_dr = 0.0;
    return r;
}

KerrResponse KerrResponse::pump_frame(const KerrSteadyState& st,
                                      const PumpFields& pumps, double kappa,
                                      double K) {
    KerrResponse r;
    r.kappa = kappa;
    // Delta_p = Delta_d - Omega_dp.
    r.detune = st.Delta_d - pumps.Omega_dp - 2.0 * K * st.n_d;
    r.Kn_d = K * st.n_d;
    r.two_Omega_dr = 2.0 * pumps.Omega_dp;
    return r;
}

cplx driven_susceptibility(double Omega, const KerrSteadyState& st,
                           double kappa, double K) {
    return KerrResponse::drive_frame(st, kappa, K).chi_g(Omega);
}

cplx gain_prefactor(double Omega, const KerrSteadyState& st, double kappa,
                    double K) {
    double detune = st.Delta_d - 2.0 * K * st.n_d;
    return cplx(0.5 * kappa, -(detune - Omega)) / cplx(kappa, 2.0 * Omega);
}

PumpFields pump_fields(const KerrSteadyState& st, double omega_p, double S_p,
                       double kappa, double kappa_e, double omega0, double K) {
    if (S_p < 0.0)
        throw validation_error("pump_fields: S_p must be non-negative");
    double omega_d = omega0 + st.Delta_d;
    double Omega_dp = omega_d - omega_p;
    double Delta_p = omega_p - omega0;
    double detune = Delta_p - 2.0 * K * st.n_d;
    cplx Kn(0.0, K * st.n_d);

    // [ 1/chi_p(0)    -i K n_d          ] (gamma_minus )   ( i sqrt(kappa_e) S_p )
    // [ +i K n_d      1/chi_p^*(2Odp)   ] (gamma_plus^*) = ( 0                   )
    cplx a11(0.5 * kappa, detune);
    cplx a12 = -Kn;
    cplx a21 = Kn;
    cplx a22(0.5 * kappa, -(detune + 2.0 * Omega_dp));
    cplx rhs1(0.0, std::sqrt(kappa_e) * S_p);

    cplx det = a11 * a22 - a12 * a21;
    if (std::abs(det) == 0.0)
        throw solver_error("pump_fields: singular response matrix");
    cplx gm = rhs1 * a22 / det;
    cplx gp_conj = -a21 * rhs1 / det;

    double scale = std::max({std::abs(a11 * gm), std::abs(a12 * gp_conj),
                             std::abs(rhs1), 1e-300});
    if (std::abs(a11 * gm + a12 * gp_conj - rhs1) > 1e-10 * scale ||
        std::abs(a21 * gm + a22 * gp_conj) > 1e-10 * scale)
        throw solver_error("pump_fields: residual above 1e-10");

    PumpFields f;
    f.omega_p = omega_p;
    f.Omega_dp = Omega_dp;
    f.gamma_minus = gm;
    f.gamma_plus = std::conj(gp_conj);
    f.n_minus = std::norm(gm);
    return f;
}

QuasiModes quasi_modes(const KerrSteadyState& st, double kappa, double kappa_e,
                       double omega0, double K) {
    double Kn = K * st.n_d;
    double radicand = (st.Delta_d - Kn) * (st.Delta_d - 3.0 * Kn);
    if (radicand <= 0.0) {
        std::ostringstream msg;
        msg << "quasi_modes: degenerate regime, (Delta_d - K n_d)(Delta_d - 3 K n_d) = "
            << radicand << " <= 0";
        throw solver_error(msg.str());
    }
    double Omega0 = std::sqrt(radicand);
    double omega_d = omega0 + st.Delta_d;

    QuasiModes qm;
    qm.Omega_s = -Omega0;
    qm.Omega_i = Omega0;
    qm.omega_s = omega_d - Omega0;
    qm.omega_i = omega_d + Omega0;
    double detune = st.Delta_d - 2.0 * Kn;
    qm.G_s = (qm.Omega_s - detune) / (2.0 * qm.Omega_s);
    qm.G_i = 1.0 - qm.G_s; // exact by construction
    qm.kappa1 = qm.G_s * kappa_e;
    qm.kappa2 = qm.G_i * kappa_e;
    qm.kappa_i_eff = kappa - qm.kappa1;
    qm.Kn_d = Kn;
    return qm;
}

std::vector<cplx> reflection_bare(const std::vector<double>& Omega,
                                  const KerrSteadyState& st, double kappa,
                                  double kappa_e, double K) {
    auto resp = KerrResponse::drive_frame(st, kappa, K);
    std::vector<cplx> s11(Omega.size());
    for (std::size_t i = 0; i < Omega.size(); ++i)
        s11[i] = 1.0 - kappa_e * resp.chi_g(Omega[i]);
    return s11;
}

std::vector<cplx> reflection_two_mode(const std::vector<double>& Omega,
                                      const QuasiModes& qm, double kappa) {
    std::vector<cplx> s11(Omega.size());
    for (std::size_t i = 0; i < Omega.size(); ++i) {
        cplx chi_s = 1.0 / cplx(0.5 * kappa, Omega[i] - qm.Omega_s);
        cplx chi_i = 1.0 / cplx(0.5 * kappa, Omega[i] - qm.Omega_i);
        s11[i] = 1.0 - qm.kappa1 * chi_s - qm.kappa2 * chi_i;
    }
    return s11;
}

OutputGains output_gain_on_resonance(const KerrSteadyState& st,
                                     const QuasiModes& qm, double kappa,
                                     double kappa_e) {
    double detune = st.Delta_d - 2.0 * qm.Kn_d;
    double Omega0 = qm.Omega_i;
    double r = 2.0 * kappa_e / kappa;
    OutputGains g;
    g.G_s_out_exact = 1.0 - r * cplx(0.5 * kappa, -(detune + Omega0)) /
                                cplx(0.5 * kappa, -2.0 * Omega0);
    g.G_i_out_exact = 1.0 - r * cplx(0.5 * kappa, -(detune - Omega0)) /
                                cplx(0.5 * kappa, 2.0 * Omega0);
    g.G_s_out_approx = 1.0 - r * qm.G_s;
    g.G_i_out_approx = 1.0 - r * qm.G_i;
    return g;
}

} // namespace ppk
