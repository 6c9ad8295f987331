#include "ppk/noise_spectra.hpp"

#include "ppk/constants.hpp"
#include "ppk/linear_response.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>

namespace ppk {

std::vector<double> bare_kerr_psd(const std::vector<double>& Omega,
                                  const KerrSteadyState& state, double kappa,
                                  double kappa_e, double K,
                                  const NoiseBaths& baths) {
    const auto resp = KerrResponse::drive_frame(state, kappa, K);
    const double kappa_i = kappa - kappa_e;
    const double Kn = K * state.n_d;
    const double Kn2 = Kn * Kn;
    const double n_e = baths.n_e_HF;
    const double n_i = baths.n_i_HF;

    std::vector<double> psd(Omega.size());
    for (std::size_t j = 0; j < Omega.size(); ++j) {
        const double W = Omega[j];
        const double g2 = std::norm(resp.chi_g(W));
        const double pbar2 = std::norm(resp.chi_p_bar(W));
        psd[j] = 0.5 + baths.n_add + n_e +
                 kappa_i * kappa_e * g2 * (n_i - n_e) +
                 kappa_e * kappa_e * Kn2 * pbar2 * g2 * (2.0 * n_e + 1.0) +
                 kappa_i * kappa_e * Kn2 * pbar2 * g2 * (n_i + n_e + 1.0);
    }
    return psd;
}

namespace {

// shared per-frequency vertex factors of the pumped system
struct Vertices {
    cplx chi_pe;   // dressed rotating-wave RF susceptibility
    cplx chi_g0, chi_g1, chi_gbar1, chi_gbar2;
    cplx v1;       // g_-^* - i K n_d g_+ chibar_p2
    cplx v2;       // g_-   - i K n_d g_+^* chibar_p2
    cplx v3;       // g_+   + i K n_d g_-^* chi_p0
    cplx amp1p;    // 1 - i K n_d chibar_p1
    cplx amp1m;    // 1 + i K n_d chi_p1
};

Vertices vertices_at(const PhotonPressureResponse& r, double W) {
    const cplx iKn(0.0, r.Kn_d());
    const cplx g_m = r.coupling().g_minus;
    const cplx g_p = r.coupling().g_plus;
    Vertices v;
    v.chi_pe = r.chi_plus_eff(W);
    v.chi_g0 = r.chi_g_k(W, 0);
    v.chi_g1 = r.chi_g_k(W, 1);
    v.chi_gbar1 = r.chi_g_bar_k(W, 1);
    v.chi_gbar2 = r.chi_g_bar_k(W, 2);
    const cplx pbar2 = r.chi_p_bar_k(W, 2);
    v.v1 = std::conj(g_m) - iKn * g_p * pbar2;
    v.v2 = g_m - iKn * std::conj(g_p) * pbar2;
    v.v3 = g_p + iKn * std::conj(g_m) * r.chi_p_k(W, 0);
    v.amp1p = 1.0 - iKn * r.chi_p_bar_k(W, 1);
    v.amp1m = 1.0 + iKn * r.chi_p_k(W, 1);
    return v;
}

// intracavity RF spectral occupation density, split by source
struct RfDensity {
    double heating_hf = 0.0;   // driven-cavity thermal terms (n_th_HF weighted)
    double backaction = 0.0;   // vacuum radiation-pressure terms (weight 1)
    double backaction_th = 0.0; // same vertices, n_th_HF weighted extra quanta
    double thermal_rf = 0.0;   // intrinsic RF baths
};

RfDensity rf_density(const PhotonPressureResponse& r, double W,
                     const NoiseBaths& baths, double Gamma_e, double Gamma_i) {
    const Vertices v = vertices_at(r, W);
    const double kappa = r.kappa();
    const double a2 = std::norm(v.chi_pe);
    const double g_alpha_sq = std::norm(r.coupling().g_alpha);
    const double kappa_i = kappa - r.kappa_e();
    const double n_th_HF = baths.n_th_HF(r.kappa_e(), kappa_i);

    const double t1 = kappa * std::norm(v.chi_g0) * a2 * std::norm(v.v1);
    const double t2 = kappa * g_alpha_sq * std::norm(v.chi_g1) * a2 * std::norm(v.amp1p);
    const double t3 = kappa * g_alpha_sq * std::norm(v.chi_gbar1) * a2 * std::norm(v.amp1m);
    const double t4 = kappa * std::norm(v.chi_gbar2) * a2 * std::norm(v.v3);

    RfDensity d;
    d.heating_hf = (t1 + t2) * n_th_HF;
    d.backaction = t3 + t4;
    d.backaction_th = (t3 + t4) * n_th_HF;
    d.thermal_rf = a2 * (Gamma_e * baths.n_e_RF + Gamma_i * baths.n_i_RF);
    return d;
}

// intracavity cavity-mode spectral occupation density, split by source
struct HfDensity {
    double thermal_hf = 0.0;   // n_th_HF weighted
    double quantum = 0.0;      // pair-amplified vacuum (weight 1)
    double quantum_th = 0.0;   // same vertices, n_th_HF weighted extra quanta
    double from_rf = 0.0;      // RF thermal noise upconverted
};

HfDensity hf_density(const PhotonPressureResponse& r, double W,
                     const NoiseBaths& baths, double Gamma_e, double Gamma_i) {
    const Vertices v = vertices_at(r, W);
    const double kappa = r.kappa();
    const double kappa_i = kappa - r.kappa_e();
    const double n_th_HF = baths.n_th_HF(r.kappa_e(), kappa_i);
    const cplx iKn(0.0, r.Kn_d());
    const double g0sq = std::norm(v.chi_g0);

    const double h1 =
        kappa * g0sq * std::norm(1.0 - v.chi_g0 * v.chi_pe * v.v2 * v.v1);
    const double h2 =
        kappa * g0sq *
        std::norm(iKn * r.chi_p_bar_k(W, 2) - v.chi_gbar2 * v.chi_pe * v.v2 * v.v3);
    const double h3 = g0sq * std::norm(v.v2) * std::norm(v.chi_pe) *
                      (Gamma_e * baths.n_e_RF + Gamma_i * baths.n_i_RF);

    HfDensity d;
    d.thermal_hf = h1 * n_th_HF;
    d.quantum = h2;
    d.quantum_th = h2 * n_th_HF;
    d.from_rf = h3;
    return d;
}

// adaptive integral of f over [lo, hi] with panel splits at the listed points
template <typename F>
double integrate_panels(const F& f, double lo, double hi,
                        std::vector<double> splits) {
    splits.push_back(lo);
    splits.push_back(hi);
    std::sort(splits.begin(), splits.end());
    splits.erase(std::unique(splits.begin(), splits.end(),
                             [&](double a, double b) {
                                 return std::abs(a - b) < 1e-9 * (hi - lo);
                             }),
                 splits.end());
    double total = 0.0;
    using quad = boost::math::quadrature::gauss_kronrod<double, 15>;
    for (std::size_t i = 0; i + 1 < splits.size(); ++i) {
        const double a = std::max(lo, splits[i]);
        const double b = std::min(hi, splits[i + 1]);
        if (b <= a) continue;
        total += quad::integrate(f, a, b, 15, 1e-10);
    }
    return total;
}

} // namespace

std::vector<double> pp_output_psd(const std::vector<double>& Omega,
                                  const PhotonPressureResponse& resp,
                                  const NoiseBaths& baths, double Gamma_e,
                                  double Gamma_i) {
    const double kappa = resp.kappa();
    const double kappa_e = resp.kappa_e();
    const double kappa_i = kappa - kappa_e;
    const RfMode& rf = resp.rf();
    const cplx g_m = resp.coupling().g_minus;
    const cplx g_p = resp.coupling().g_plus;

    std::vector<double> psd(Omega.size());
    for (std::size_t j = 0; j < Omega.size(); ++j) {
        const double W = Omega[j];
        const cplx chi_k0 = resp.chi_k(W);
        const cplx ax = resp.pair_vertex_A(W) * resp.chi_om_bar2(W);
        const cplx chi_plus0 = 1.0 / cplx(0.5 * rf.Gamma0, W - rf.Omega0);
        const cplx rf_vertex = g_m - cplx(0.0, 1.0) * std::conj(g_p) * ax;

        psd[j] = baths.n_add +
                 kappa_e * std::norm(chi_k0) * std::norm(rf_vertex) *
                     std::norm(chi_plus0) *
                     (Gamma_e * (baths.n_e_RF + 0.5) +
                      Gamma_i * (baths.n_i_RF + 0.5)) +
                 std::norm(1.0 - kappa_e * chi_k0) * (baths.n_e_HF + 0.5) +
                 kappa_e * kappa_i * std::norm(chi_k0) * (baths.n_i_HF + 0.5) +
                 kappa_e * kappa_e * std::norm(chi_k0 * ax) * (baths.n_e_HF + 0.5) +
                 kappa_e * kappa_i * std::norm(chi_k0 * ax) * (baths.n_i_HF + 0.5);
    }
    return psd;
}

std::vector<double> pp_output_psd_effective(const std::vector<double>& Omega,
                                            const PhotonPressureResponse& resp,
                                            const QuasiModes& qm,
                                            const NoiseBaths& baths,
                                            double Gamma_e, double Gamma_i) {
    const double kappa = resp.kappa();
    const double kappa_e = resp.kappa_e();
    const RfMode& rf = resp.rf();
    const double g_eff = resp.coupling().g_eff;
    const double kappa1 = qm.G_s * kappa_e;
    const double Omega_s_pf = resp.Omega_dp() + qm.Omega_s;
    const double n_th_HF = baths.n_th_HF(kappa_e, kappa - kappa_e);
    const double n_tilde_th =
        qm.G_s * qm.G_s * n_th_HF +
        qm.Kn_d * qm.Kn_d /
            (kappa * kappa + 4.0 * qm.Omega_s * qm.Omega_s) * (n_th_HF + 1.0);

    std::vector<double> psd(Omega.size());
    for (std::size_t j = 0; j < Omega.size(); ++j) {
        const double W = Omega[j];
        const cplx chi_s = 1.0 / cplx(0.5 * kappa, W - Omega_s_pf);
        const cplx chi_plus = 1.0 / cplx(0.5 * rf.Gamma0, W - rf.Omega0);
        const cplx chi_s_eff = chi_s / (1.0 + g_eff * g_eff * chi_plus * chi_s);
        psd[j] = 0.5 + baths.n_add +
                 kappa1 * kappa * std::norm(chi_s_eff) * (n_tilde_th / qm.G_s) +
                 kappa1 * g_eff * g_eff * std::norm(chi_plus) *
                     std::norm(chi_s_eff) *
                     (Gamma_e * baths.n_e_RF + Gamma_i * baths.n_i_RF);
    }
    return psd;
}

QuantumNoiseOccupation effective_temperatures(const KerrSteadyState& state,
                                              const QuasiModes& qm,
                                              double kappa, double K) {
    const auto resp = KerrResponse::drive_frame(state, kappa, K);
    const double Kn = K * state.n_d;
    QuantumNoiseOccupation q;
    q.n_tilde_q = Kn * Kn * qm.G_s * qm.G_s * std::norm(resp.chi_p(-qm.Omega_s));
    q.n_bar_q = q.n_tilde_q / qm.G_s;
    q.T_eff = hbar * qm.omega_s / k_boltzmann * q.n_tilde_q;
    return q;
}

OccupationReport occupations_by_integration(const PhotonPressureResponse& resp,
                                            const QuasiModes& qm,
                                            const NoiseBaths& baths,
                                            double Gamma_e, double Gamma_i,
                                            double window_halfwidth) {
    const RfMode& rf = resp.rf();
    const double C = std::max(resp.coupling().C_eff, 0.0);
    const double Gamma_t = rf.Gamma0 * (1.0 + C);
    const double W0 = rf.Omega0;
    const double halfwidth = window_halfwidth > 0.0
                                 ? window_halfwidth
                                 : 20.0 * std::max(resp.kappa(), Gamma_t);
    const double g = resp.coupling().g_eff;
    const double Omega_sig = resp.Omega_dp() + qm.Omega_s;

    const std::vector<double> splits = {W0 - 10.0 * Gamma_t, W0 - 2.0 * g,
                                        W0 - Gamma_t,        W0 + Gamma_t,
                                        W0 + 2.0 * g,        W0 + 10.0 * Gamma_t,
                                        Omega_sig};
    const double lo = W0 - halfwidth;
    const double hi_rf = W0 + halfwidth;
    const double hi_hf = std::min(hi_rf, resp.Omega_dp());

    const double inv2pi = 1.0 / two_pi;
    const auto rf_total = [&](double W) {
        const RfDensity d = rf_density(resp, W, baths, Gamma_e, Gamma_i);
        return (d.heating_hf + d.backaction + d.backaction_th + d.thermal_rf) *
               inv2pi;
    };
    const auto rf_cool = [&](double W) {
        return rf_density(resp, W, baths, Gamma_e, Gamma_i).thermal_rf * inv2pi;
    };
    const auto rf_rpsn = [&](double W) {
        return rf_density(resp, W, baths, Gamma_e, Gamma_i).backaction * inv2pi;
    };
    const auto hf_total = [&](double W) {
        const HfDensity d = hf_density(resp, W, baths, Gamma_e, Gamma_i);
        return (d.thermal_hf + d.quantum + d.quantum_th + d.from_rf) * inv2pi;
    };
    const auto hf_quantum = [&](double W) {
        return hf_density(resp, W, baths, Gamma_e, Gamma_i).quantum * inv2pi;
    };

    OccupationReport rep;
    rep.n_th_RF = baths.n_th_RF(Gamma_e, Gamma_i);
    rep.n_fin_RF = integrate_panels(rf_total, lo, hi_rf, splits);
    rep.n_cool_RF = integrate_panels(rf_cool, lo, hi_rf, splits);
    rep.n_rpsn_RF = integrate_panels(rf_rpsn, lo, hi_rf, splits);
    rep.n_fin_HF = integrate_panels(hf_total, lo, hi_hf, splits);
    rep.n_q_HF_tilde = integrate_panels(hf_quantum, lo, hi_hf, splits);
    rep.n_q_HF_bar = rep.n_q_HF_tilde / qm.G_s;
    rep.T_eff = hbar * qm.omega_s / k_boltzmann * rep.n_q_HF_tilde;
    return rep;
}

OccupationReport occupations_analytic(double g_eff, double G_s, double kappa,
                                      double Gamma0, double n_th_RF,
                                      double n_th_HF, double n_tilde_q,
                                      double omega_s) {
    const double g2 = 4.0 * g_eff * g_eff;
    const double sum = kappa + Gamma0;
    const double denom = g2 + kappa * Gamma0;
    const double n_tilde_eff = G_s * G_s * n_th_HF + n_tilde_q * (n_th_HF + 1.0);
    const double n_bar_eff = n_tilde_eff / G_s;
    const double n_tilde_th_RF = G_s * n_th_RF;

    OccupationReport rep;
    rep.n_th_RF = n_th_RF;
    rep.n_cool_RF = (Gamma0 / sum) * ((g2 + kappa * sum) / denom) * n_th_RF;
    rep.n_rpsn_RF = (kappa / sum) * (g2 / denom) * n_bar_eff;
    rep.n_fin_RF = rep.n_cool_RF + rep.n_rpsn_RF;
    rep.n_fin_HF = (kappa / sum) * ((g2 + Gamma0 * sum) / denom) * n_tilde_eff +
                   (Gamma0 / sum) * (g2 / denom) * n_tilde_th_RF;
    rep.n_q_HF_tilde = n_tilde_q;
    rep.n_q_HF_bar = n_tilde_q / G_s;
    rep.T_eff = hbar * omega_s / k_boltzmann * n_tilde_q;
    return rep;
}

} // namespace ppk
