#include "ppk/sensing.hpp"

#include "ppk/linear_response.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ppk {

namespace {

// detection denominator kappa_e |G|^2 |chi_s|^2 |g_-|^2 at pump-frame W
double conversion_gain(double W, const SensingInputs& in) {
    const double W_df = W - in.pumps.Omega_dp;
    const cplx G = gain_prefactor(W_df, in.state, in.kappa, in.coupling.K);
    const cplx chi_s = 1.0 / cplx(0.5 * in.kappa, W_df - in.qm.Omega_s);
    return in.kappa_e * std::norm(G) * std::norm(chi_s) *
           std::norm(in.coupling.g_minus);
}

SensingReport convert(const std::vector<double>& Omega,
                      const std::vector<double>* S_nn,
                      const SensingInputs& in) {
    if (S_nn != nullptr && S_nn->size() != Omega.size())
        throw validation_error("flux_spectral_density: grid and PSD sizes differ");
    const QuantumNoiseOccupation q =
        effective_temperatures(in.state, in.qm, in.kappa, in.coupling.K);
    const double phi2 = 2.0 * in.Phi_zpf * in.Phi_zpf;

    SensingReport rep;
    rep.omega.resize(Omega.size());
    rep.S_phi_det.resize(Omega.size());
    rep.S_imp.resize(Omega.size());
    rep.S_imp_min = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < Omega.size(); ++j) {
        const double W = Omega[j];
        const double W_df = W - in.pumps.Omega_dp;
        const double denom = conversion_gain(W, in);
        const cplx chi_s = 1.0 / cplx(0.5 * in.kappa, W_df - in.qm.Omega_s);
        const double n_jpa =
            in.kappa_e * in.kappa * std::norm(chi_s) * q.n_tilde_q;
        const double imp = phi2 * (0.5 + in.n_add + n_jpa) / denom;
        rep.omega[j] = in.pumps.omega_p + W;
        rep.S_imp[j] = imp;
        rep.S_phi_det[j] = S_nn ? phi2 * (*S_nn)[j] / denom : imp;
        rep.S_imp_min = std::min(rep.S_imp_min, imp);
    }
    rep.n_JPA_at_res = 4.0 * (in.kappa_e / in.kappa) * q.n_tilde_q;
    const double Gamma_eff = in.Gamma0 * (1.0 + in.coupling.C_eff);
    rep.sql = phi2 / Gamma_eff;
    rep.ratio_to_sql = rep.S_imp_min / rep.sql;
    return rep;
}

} // namespace

SensingReport flux_spectral_density(const std::vector<double>& Omega,
                                    const std::vector<double>& S_nn,
                                    const SensingInputs& in) {
    return convert(Omega, &S_nn, in);
}

SensingReport imprecision(const std::vector<double>& Omega,
                          const SensingInputs& in) {
    return convert(Omega, nullptr, in);
}

std::vector<double> imprecision_min_vs_drive(
    const std::vector<DriveSweepEntry>& points, double kappa_e, double C_eff,
    double n_add, double Phi_zpf, double Gamma0) {
    if (C_eff <= 0.0)
        throw validation_error("imprecision_min_vs_drive: C_eff must be positive");
    std::vector<double> out(points.size());
    const double phi2 = 2.0 * Phi_zpf * Phi_zpf;
    for (std::size_t j = 0; j < points.size(); ++j) {
        const DriveSweepEntry& p = points[j];
        const double n_jpa = 4.0 * (kappa_e / p.kappa) * p.n_tilde_q;
        out[j] = phi2 * (0.5 + n_add + n_jpa) * p.kappa /
                 (kappa_e * p.G_s * C_eff * Gamma0);
    }
    return out;
}

std::vector<std::vector<double>> sql_landscape(
    const std::vector<double>& G_s_grid,
    const std::vector<double>& kappa_ratio_grid, double C_eff, double n_add) {
    std::vector<std::vector<double>> out(G_s_grid.size());
    for (std::size_t i = 0; i < G_s_grid.size(); ++i) {
        out[i].resize(kappa_ratio_grid.size());
        const double Gs = G_s_grid[i];
        for (std::size_t j = 0; j < kappa_ratio_grid.size(); ++j) {
            const double r = kappa_ratio_grid[j];
            const double n_jpa = 4.0 * r * Gs * (Gs - 1.0);
            out[i][j] = (1.0 + C_eff) / C_eff / (Gs * r) *
                        (0.5 + n_add + n_jpa);
        }
    }
    return out;
}

} // namespace ppk
