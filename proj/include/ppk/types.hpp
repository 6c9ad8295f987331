#pragma once

#include <complex>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace ppk {

using cplx = std::complex<double>;

// Error taxonomy maps one-to-one onto CLI exit codes:
// validation_error -> 1, solver_error -> 2, io_error -> 3.
struct validation_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct solver_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct io_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct TlsParams {
    double n_cr = 0.0;      // critical photon number for TLS saturation
    double Gamma2 = 0.0;    // TLS dephasing rate, rad/s
    double Delta_tls = 0.0; // drive-TLS detuning, rad/s
};

struct CircuitParams {
    double omega0_sweetspot = 0.0; // cavity frequency at zero flux, rad/s
    double Lambda = 0.0;           // inductance participation ratio, 0 < Lambda < 1
    double beta_L = 0.0;           // screening parameter, >= 0
    double C_HF = 0.0;             // cavity capacitance, F
    double L_HF = 0.0;             // cavity inductance, H
    double L_j0 = 0.0;             // zero-flux junction inductance, H
    double Phi_zpf = 0.0;          // RF zero-point flux, units of Phi0
    double Omega0_RF = 0.0;        // RF mode frequency, rad/s
    double Gamma_e = 0.0;          // RF external linewidth, rad/s
    double Gamma_i = 0.0;          // RF internal linewidth, rad/s
    double kappa_base = 0.0;       // undriven total cavity linewidth, rad/s
    double kappa_e_base = 0.0;     // external cavity linewidth, rad/s
    double K_RF = 0.0;             // RF self-Kerr, rad/s; stored, never dynamical
    TlsParams tls;

    double Gamma0() const { return Gamma_e + Gamma_i; }
};

struct FluxPoint {
    double phi_b = 0.0;      // applied flux, Phi0
    double phi_total = 0.0;  // screened total flux, Phi0
    double omega0 = 0.0;     // cavity frequency, rad/s
    double K = 0.0;          // cavity self-Kerr, rad/s; K < 0
    double G0 = 0.0;         // d(omega0)/d(phi_b), rad/s per Phi0
    double G_K = 0.0;        // dK/d(phi_b), rad/s per Phi0
    double g0 = 0.0;         // G0 * Phi_zpf, rad/s
    double g_K = 0.0;        // G_K * Phi_zpf, rad/s
};

struct DriveConfig {
    double omega_d = 0.0; // drive frequency, rad/s
    double S_d = 0.0;     // drive amplitude, sqrt(photons/s), >= 0
};

enum class Branch { low, middle_unstable, high };

const char* branch_name(Branch b);

struct KerrSteadyState {
    double n_d = 0.0;     // intracavity drive photons
    double phi_d = 0.0;   // drive response phase, rad
    double Delta_d = 0.0; // omega_d - omega0, rad/s
    Branch branch = Branch::low;
    cplx alpha_d;         // sqrt(n_d) * exp(-i phi_d)
};

struct PumpFields {
    double omega_p = 0.0;  // pump frequency, rad/s
    double Omega_dp = 0.0; // omega_d - omega_p, rad/s
    cplx gamma_minus;      // pump-frequency intracavity amplitude, sqrt(photons)
    cplx gamma_plus;       // four-wave idler amplitude at 2 omega_d - omega_p
    double n_minus = 0.0;  // |gamma_minus|^2
};

struct QuasiModes {
    double omega_s = 0.0;     // signal quasi-mode frequency, rad/s
    double omega_i = 0.0;     // idler quasi-mode frequency, rad/s
    double Omega_s = 0.0;     // omega_s - omega_d, rad/s (negative)
    double Omega_i = 0.0;     // -Omega_s
    double G_s = 0.0;         // signal intracavity gain
    double G_i = 0.0;         // idler gain, 1 - G_s
    double kappa1 = 0.0;      // G_s * kappa_e, rad/s
    double kappa2 = 0.0;      // G_i * kappa_e, rad/s
    double kappa_i_eff = 0.0; // kappa - kappa1, rad/s
    double Kn_d = 0.0;        // K * n_d at the operating point, rad/s
};

struct LinearizedCoupling {
    double g0_tilde = 0.0; // g0 + 2 g_K n_d, rad/s
    cplx g_minus;          // gamma_minus * G_tilde * Phi_zpf, rad/s
    cplx g_plus;           // gamma_plus * G_tilde * Phi_zpf, rad/s
    cplx g_alpha;          // alpha_d * G_prime * Phi_zpf, rad/s
    double g_eff = 0.0;    // sqrt(G_s n_minus) * |g0_tilde|, rad/s
    double C_eff = 0.0;    // 4 g_eff^2 / (kappa Gamma0)
    double K = 0.0;        // Kerr constant used when linearizing, rad/s
};

struct NoiseBaths {
    double n_e_HF = 0.0; // external cavity bath occupation
    double n_i_HF = 0.0; // internal cavity bath occupation
    double n_e_RF = 0.0; // external RF bath occupation
    double n_i_RF = 0.0; // internal RF bath occupation
    double n_add = 0.0;  // amplifier added noise, quanta

    double n_th_HF(double kappa_e, double kappa_i) const {
        return (kappa_e * n_e_HF + kappa_i * n_i_HF) / (kappa_e + kappa_i);
    }
    double n_th_RF(double Gamma_e, double Gamma_i) const {
        return (Gamma_e * n_e_RF + Gamma_i * n_i_RF) / (Gamma_e + Gamma_i);
    }
};

struct OccupationReport {
    double n_th_RF = 0.0;     // thermal RF occupation, pump off
    double n_fin_RF = 0.0;    // final RF occupation
    double n_cool_RF = 0.0;   // cooling contribution
    double n_rpsn_RF = 0.0;   // radiation-pressure shot-noise contribution
    double n_fin_HF = 0.0;    // final cavity-mode occupation
    double n_q_HF_tilde = 0.0; // amplified quantum noise, signal-mode units
    double n_q_HF_bar = 0.0;  // n_q_HF_tilde / G_s
    double T_eff = 0.0;       // effective signal-mode temperature, K
};

struct SensingReport {
    std::vector<double> omega;      // absolute frequency grid, rad/s
    std::vector<double> S_phi_det;  // detected flux PSD, Phi0^2/Hz
    std::vector<double> S_imp;      // imprecision PSD, Phi0^2/Hz
    double S_imp_min = 0.0;         // minimum over the grid, Phi0^2/Hz
    double n_JPA_at_res = 0.0;      // amplified-noise quanta at the signal resonance
    double sql = 0.0;               // 2 Phi_zpf^2 / Gamma_eff, Phi0^2/Hz
    double ratio_to_sql = 0.0;      // S_imp_min / sql
};

struct BackgroundModel {
    double a0 = 0.0;   // amplitude polynomial, constant
    double a1 = 0.0;   // amplitude polynomial, linear in omega
    double a2 = 0.0;   // amplitude polynomial, quadratic in omega
    double phi0 = 0.0; // phase offset, rad
    double phi1 = 0.0; // phase slope, rad per (rad/s)
    double theta = 0.0; // resonance interference rotation, rad
    double omega_ref = 0.0; // expansion point for the polynomials, rad/s
};

struct FitResult {
    std::map<std::string, double> parameters;
    std::map<std::string, double> standard_errors;
    double residual_norm = 0.0; // RMS of complex residuals at the optimum
    bool converged = false;
    int n_iterations = 0;
};

// A frequency-indexed complex trace (reflection) or real trace (PSD).
struct SpectrumTrace {
    std::vector<double> omega; // absolute frequency, rad/s
    std::vector<cplx> values;
    std::map<std::string, double> meta; // omega_d, omega_p, kappa_e, ... as needed
};

struct Trajectory {
    double dt = 0.0;               // uniform sample spacing, s
    std::vector<double> t;         // sample times, s
    std::vector<cplx> alpha;       // intracavity field, drive rotating frame
    std::vector<double> phi;       // RF flux, Phi0
    std::vector<double> dphi_dt;   // RF flux velocity, Phi0/s
    int integrator_order = 5;
    unsigned long long seed = 0;   // 0 for deterministic runs
};

} // namespace ppk
