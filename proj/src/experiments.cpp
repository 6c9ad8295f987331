#include "ppk/experiments.hpp"

#include "ppk/constants.hpp"
#include "ppk/fitting.hpp"
#include "ppk/kerr_steady_state.hpp"
#include "ppk/linear_response.hpp"
#include "ppk/noise_spectra.hpp"
#include "ppk/parallel.hpp"
#include "ppk/param_model.hpp"
#include "ppk/photon_pressure.hpp"
#include "ppk/random.hpp"
#include "ppk/sensing.hpp"
#include "ppk/time_domain.hpp"
#include "ppk/trace_io.hpp"
#include "ppk/types.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <stdexcept>

namespace ppk {

namespace {

constexpr double nan_v = std::numeric_limits<double>::quiet_NaN();

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec)
        throw io_error("cannot create output directory " + dir + ": " +
                       ec.message());
}

std::string join(const std::string& dir, const std::string& name) {
    return dir + "/" + name;
}

std::vector<double> linspace(double a, double b, std::size_t n) {
    if (n < 2)
        throw validation_error("grid needs at least 2 points");
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i)
        g[i] = a + (b - a) * static_cast<double>(i) /
                       static_cast<double>(n - 1);
    return g;
}

std::vector<double> logspace(double a, double b, std::size_t n) {
    if (a <= 0 || b <= 0)
        throw validation_error("log grid endpoints must be positive");
    std::vector<double> g = linspace(std::log(a), std::log(b), n);
    for (double& x : g) x = std::exp(x);
    return g;
}

// The operating point shared by the reflection/noise/cooling/sensing
// runners: an anchored driven state plus the low-frequency mode and baths.
struct Point {
    FluxPoint flux;
    double kappa = 0.0;
    double kappa_e = 0.0;
    double kappa_undriven = 0.0;
    KerrSteadyState state;
    DriveConfig drive;
    RfMode rf;
    double Gamma_e = 0.0;
    double Gamma_i = 0.0;
    NoiseBaths baths;
    double Phi_zpf = 0.0;
};

Point load_point(const Config& c) {
    Point p;
    p.Phi_zpf = c.get_double("point.Phi_zpf");
    if (p.Phi_zpf <= 0)
        throw validation_error("point.Phi_zpf must be positive");
    p.flux.phi_b = c.get_double("point.phi_b", 0.0);
    p.flux.omega0 = hz_to_rad(c.get_double("point.omega0_Hz"));
    p.flux.K = hz_to_rad(c.get_double("point.K_Hz"));
    p.flux.g0 = hz_to_rad(c.get_double("point.g0_Hz"));
    p.flux.g_K = hz_to_rad(c.get_double("point.g_K_Hz", 0.0));
    p.flux.G0 = p.flux.g0 / p.Phi_zpf;
    p.flux.G_K = p.flux.g_K / p.Phi_zpf;
    p.kappa = hz_to_rad(c.get_double("point.kappa_Hz"));
    p.kappa_e = hz_to_rad(c.get_double("point.kappa_e_Hz"));
    p.kappa_undriven =
        hz_to_rad(c.get_double("point.kappa_undriven_Hz",
                               rad_to_hz(p.kappa)));
    if (p.kappa_e <= 0 || p.kappa < p.kappa_e)
        throw validation_error("point: need 0 < kappa_e_Hz <= kappa_Hz");

    double n_d = c.get_double("point.n_d");
    double Delta_d = hz_to_rad(c.get_double("point.Delta_d_Hz"));
    std::string br = c.get_string("point.branch", "high");
    if (br != "high" && br != "low")
        throw validation_error("point.branch must be 'high' or 'low'");
    if (n_d > 0) {
        DriveCalibration cal =
            drive_for_target_nd(n_d, p.flux, p.kappa, p.kappa_e, Delta_d,
                                br == "high" ? Branch::high : Branch::low);
        if (!cal.on_requested_branch)
            throw validation_error(
                "point: target n_d does not sit on the requested branch");
        p.state = cal.state;
        p.drive = cal.drive;
    } else {
        p.state = KerrSteadyState{0.0, 0.0, Delta_d, Branch::low, cplx(0.0)};
        p.drive = DriveConfig{p.flux.omega0 + Delta_d, 0.0};
    }

    p.rf.Omega0 = hz_to_rad(c.get_double("rf.Omega0_Hz"));
    p.Gamma_e = hz_to_rad(c.get_double("rf.Gamma_e_Hz"));
    p.Gamma_i = hz_to_rad(c.get_double("rf.Gamma_i_Hz"));
    p.rf.Gamma0 = p.Gamma_e + p.Gamma_i;
    if (p.rf.Omega0 <= 0 || p.Gamma_e < 0 || p.Gamma_i < 0 ||
        p.rf.Gamma0 <= 0)
        throw validation_error("rf: need Omega0_Hz > 0 and Gamma0 > 0");

    p.baths.n_e_HF = c.get_double("baths.n_e_HF", 0.0);
    p.baths.n_i_HF = c.get_double("baths.n_i_HF", 0.0);
    p.baths.n_e_RF = c.get_double("baths.n_e_RF", 0.0);
    p.baths.n_i_RF = c.get_double("baths.n_i_RF", 0.0);
    p.baths.n_add = c.get_double("baths.n_add", 0.0);
    return p;
}

double snap_to_grid(double x, double step) {
    if (step <= 0) return x;
    return step * std::round(x / step);
}

struct Pumped {
    PumpFields pumps;
    QuasiModes qm;
    LinearizedCoupling cpl;
    double S_p = 0.0;
};

// Builds the pump at the configured placement and power. C_override >= 0
// replaces pump.C_eff / pump.n_minus (used by per-power sweeps).
Pumped make_pump(const Config& c, const Point& pt, double C_override) {
    Pumped out;
    out.qm = quasi_modes(pt.state, pt.kappa, pt.kappa_e, pt.flux.omega0,
                         pt.flux.K);
    double Omega_dp = 0.0;
    std::string place = c.get_string("pump.place", "signal_red_sideband");
    if (place == "explicit")
        Omega_dp = hz_to_rad(c.get_double("pump.Omega_dp_Hz"));
    else if (place == "signal_red_sideband")
        Omega_dp = -out.qm.Omega_s + pt.rf.Omega0;
    else
        throw validation_error(
            "pump.place must be signal_red_sideband or explicit");
    Omega_dp =
        snap_to_grid(Omega_dp, hz_to_rad(c.get_double("pump.snap_Hz", 0.0)));
    double omega_p = pt.drive.omega_d - Omega_dp;

    double g0t = pt.flux.g0 + 2.0 * pt.flux.g_K * pt.state.n_d;
    double n_target = 0.0;
    double C = C_override >= 0 ? C_override : c.get_double("pump.C_eff", -1.0);
    if (C >= 0) {
        if (g0t == 0.0)
            throw validation_error(
                "pump: coupling vanishes, C_eff target unreachable");
        n_target =
            C * pt.kappa * pt.rf.Gamma0 / (4.0 * out.qm.G_s * g0t * g0t);
    } else {
        n_target = c.get_double("pump.n_minus");
    }
    if (n_target < 0)
        throw validation_error("pump: photon target must be non-negative");

    PumpFields unit = pump_fields(pt.state, omega_p, 1.0, pt.kappa,
                                  pt.kappa_e, pt.flux.omega0, pt.flux.K);
    if (unit.n_minus <= 0)
        throw solver_error("pump: unit-amplitude response vanished");
    out.S_p = std::sqrt(n_target / unit.n_minus);
    out.pumps = pump_fields(pt.state, omega_p, out.S_p, pt.kappa, pt.kappa_e,
                            pt.flux.omega0, pt.flux.K);
    out.cpl = linearized_couplings(pt.flux, pt.state, out.pumps, out.qm,
                                   pt.kappa, pt.rf.Gamma0);
    return out;
}

// Frequency grid in the pump frame, centered on the signal quasi-mode or on
// the drive image.
std::vector<double> pump_frame_grid(const Config& c, const Pumped& pp) {
    double span = hz_to_rad(c.get_double("grid.span_Hz"));
    auto npts = static_cast<std::size_t>(c.get_int("grid.points"));
    if (span <= 0 || npts < 2)
        throw validation_error("grid: need span_Hz > 0 and points >= 2");
    std::string center = c.get_string("grid.center", "signal");
    double W0 = 0.0;
    if (center == "signal")
        W0 = pp.pumps.Omega_dp + pp.qm.Omega_s;
    else if (center == "drive")
        W0 = pp.pumps.Omega_dp;
    else
        throw validation_error("grid.center must be signal or drive");
    return linspace(W0 - 0.5 * span, W0 + 0.5 * span, npts);
}

LinewidthModel load_linewidth(const Config& c) {
    LinewidthModel lw;
    lw.kappa_e = hz_to_rad(c.get_double("linewidth.kappa_e_Hz"));
    lw.kappa_i_residual =
        hz_to_rad(c.get_double("linewidth.kappa_i_residual_Hz"));
    lw.kappa_tls0 = hz_to_rad(c.get_double("linewidth.kappa_tls0_Hz"));
    lw.tls.n_cr = c.get_double("linewidth.n_cr");
    lw.tls.Gamma2 = hz_to_rad(c.get_double("linewidth.Gamma2_Hz"));
    lw.tls.Delta_tls = hz_to_rad(c.get_double("linewidth.Delta_tls_Hz", 0.0));
    return lw;
}

CircuitParams load_circuit(const Config& c) {
    CircuitParams p;
    p.omega0_sweetspot = hz_to_rad(c.get_double("circuit.omega0_sweetspot_Hz"));
    p.Lambda = c.get_double("circuit.Lambda");
    p.beta_L = c.get_double("circuit.beta_L");
    p.C_HF = c.get_double("circuit.C_HF_F");
    p.L_HF = c.get_double("circuit.L_HF_H");
    p.L_j0 = c.get_double("circuit.L_j0_H");
    p.Phi_zpf = c.get_double("circuit.Phi_zpf");
    p.Omega0_RF = hz_to_rad(c.get_double("circuit.Omega0_RF_Hz"));
    p.Gamma_e = hz_to_rad(c.get_double("circuit.Gamma_e_Hz"));
    p.Gamma_i = hz_to_rad(c.get_double("circuit.Gamma_i_Hz"));
    p.kappa_base = hz_to_rad(c.get_double("circuit.kappa_base_Hz"));
    p.kappa_e_base = hz_to_rad(c.get_double("circuit.kappa_e_base_Hz"));
    p.K_RF = hz_to_rad(c.get_double("circuit.K_RF_Hz", 0.0));
    p.tls.n_cr = c.get_double("linewidth.n_cr", 1.0);
    p.tls.Gamma2 = hz_to_rad(c.get_double("linewidth.Gamma2_Hz", 1.0));
    p.tls.Delta_tls = hz_to_rad(c.get_double("linewidth.Delta_tls_Hz", 0.0));
    validate(p);
    return p;
}

std::string hash_hex(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(h));
    return buf;
}

std::string basename_of(const std::string& path) {
    std::size_t slash = path.find_last_of('/');
    return slash == std::string::npos ? path : path.substr(slash + 1);
}

// run_summary.json carries only reproducible fields so that identical
// config + seed gives identical bytes.
void finalize(RunResult& r, const std::string& out_dir,
              const std::string& command, const Config& cfg,
              unsigned long long seed) {
    nlohmann::json j;
    j["command"] = command;
    j["config_hash"] = hash_hex(cfg.hash());
    j["seed"] = seed;
    nlohmann::json files = nlohmann::json::array();
    for (const auto& p : r.outputs) files.push_back(basename_of(p));
    j["outputs"] = files;
    j["scalars"] = r.scalars;
    std::string path = join(out_dir, "run_summary.json");
    write_text(path, j.dump(2) + "\n");
    r.outputs.push_back(path);
}

void write_fit_json(const std::string& path, const FitResult& fit) {
    nlohmann::json j;
    j["parameters"] = fit.parameters;
    j["standard_errors"] = fit.standard_errors;
    j["residual_norm"] = fit.residual_norm;
    j["converged"] = fit.converged;
    j["n_iterations"] = fit.n_iterations;
    write_text(path, j.dump(2) + "\n");
}

void add_fit_scalars(RunResult& r, const std::string& prefix,
                     const FitResult& fit) {
    for (const auto& [k, v] : fit.parameters)
        r.scalars[prefix + k] = v;
    for (const auto& [k, v] : fit.standard_errors)
        r.scalars[prefix + k + "_err"] = v;
    r.scalars[prefix + "converged"] = fit.converged ? 1.0 : 0.0;
    r.scalars[prefix + "residual_norm"] = fit.residual_norm;
}

std::vector<cplx> add_complex_noise(const std::vector<cplx>& v, double sigma,
                                    GaussianRng& rng) {
    std::vector<cplx> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        out[i] = v[i] + sigma * cplx(rng.gaussian(), rng.gaussian());
    return out;
}

} // namespace

RunResult run_reflection(const Config& cfg, const std::string& out_dir,
                         unsigned long long seed, unsigned threads) {
    ensure_dir(out_dir);
    RunResult r;
    Point pt = load_point(cfg);
    Pumped pp = make_pump(cfg, pt, -1.0);
    PhotonPressureResponse resp(pp.cpl, pt.state, pp.pumps, pt.rf, pt.kappa,
                                pt.kappa_e);
    std::vector<double> W = pump_frame_grid(cfg, pp);
    double omega_p = pt.drive.omega_d - pp.pumps.Omega_dp;
    double omega_s_abs = pt.drive.omega_d + pp.qm.Omega_s;
    std::vector<double> omega_abs(W.size());
    for (std::size_t i = 0; i < W.size(); ++i) omega_abs[i] = omega_p + W[i];

    auto s11_ins = reflection_full(W, resp, ReflectionRoute::insertion);
    auto s11_drs = reflection_full(W, resp, ReflectionRoute::dressed);
    auto s11_eff = reflection_effective(W, pp.qm.kappa1, pt.kappa,
                                        pp.cpl.g_eff, pt.rf,
                                        pp.pumps.Omega_dp + pp.qm.Omega_s);
    std::vector<double> Wd(W.size());
    for (std::size_t i = 0; i < W.size(); ++i)
        Wd[i] = W[i] - pp.pumps.Omega_dp;
    auto s11_off =
        reflection_bare(Wd, pt.state, pt.kappa, pt.kappa_e, pt.flux.K);

    const std::pair<const char*, const std::vector<cplx>*> traces[] = {
        {"reflection_insertion.csv", &s11_ins},
        {"reflection_dressed.csv", &s11_drs},
        {"reflection_effective.csv", &s11_eff},
        {"reflection_pump_off.csv", &s11_off},
    };
    for (const auto& [name, trace] : traces) {
        std::string path = join(out_dir, name);
        write_reflection_csv(path, omega_abs, *trace, omega_s_abs);
        r.outputs.push_back(path);
    }

    BackactionReport ba = backaction_self_energies(resp);
    CooperativityBudget bud = cooperativity_budget(
        pt.flux, pt.state, pp.pumps, pp.qm, pp.cpl, pt.rf, pt.kappa,
        pt.kappa_e, pt.kappa_undriven, pp.S_p);

    if (cfg.has("reflection.C_list")) {
        std::vector<double> Cs = cfg.get_list("reflection.C_list");
        std::vector<std::vector<double>> rows(Cs.size());
        parallel_for(Cs.size(), threads, [&](std::size_t i) {
            Pumped q = make_pump(cfg, pt, Cs[i]);
            PhotonPressureResponse r2(q.cpl, pt.state, q.pumps, pt.rf,
                                      pt.kappa, pt.kappa_e);
            BackactionReport b2 = backaction_self_energies(r2);
            CooperativityBudget bd = cooperativity_budget(
                pt.flux, pt.state, q.pumps, q.qm, q.cpl, pt.rf, pt.kappa,
                pt.kappa_e, pt.kappa_undriven, q.S_p);
            rows[i] = {Cs[i],
                       q.S_p,
                       q.pumps.n_minus,
                       rad_to_hz(q.cpl.g_eff),
                       q.cpl.C_eff,
                       b2.C_from_width,
                       bd.C_undriven_same_tone,
                       bd.C_undriven_own_sideband,
                       bd.enhancement_same_tone,
                       bd.enhancement_own_sideband,
                       bd.factor_linewidth,
                       bd.factor_coupling,
                       bd.factor_field,
                       bd.factor_gain};
        });
        std::string path = join(out_dir, "cooperativity.csv");
        write_csv(path,
                  {"C_target", "S_p", "n_minus", "g_eff_Hz", "C_eff",
                   "C_from_width", "C_undriven_same_tone",
                   "C_undriven_own_sideband", "enhancement_same_tone",
                   "enhancement_own_sideband", "factor_linewidth",
                   "factor_coupling", "factor_field", "factor_gain"},
                  rows);
        r.outputs.push_back(path);
    }

    double min_abs = 1e300;
    for (const cplx& s : s11_drs) min_abs = std::min(min_abs, std::abs(s));
    r.scalars["C_eff"] = pp.cpl.C_eff;
    r.scalars["g_eff_Hz"] = rad_to_hz(pp.cpl.g_eff);
    r.scalars["G_s"] = pp.qm.G_s;
    r.scalars["kappa1_Hz"] = rad_to_hz(pp.qm.kappa1);
    r.scalars["n_minus"] = pp.pumps.n_minus;
    r.scalars["Omega_dp_Hz"] = rad_to_hz(pp.pumps.Omega_dp);
    r.scalars["min_abs_s11_dressed"] = min_abs;
    r.scalars["Gamma_eff_Hz"] = rad_to_hz(ba.Gamma_eff);
    r.scalars["C_from_width"] = ba.C_from_width;
    r.scalars["enhancement_same_tone"] = bud.enhancement_same_tone;
    r.scalars["enhancement_own_sideband"] = bud.enhancement_own_sideband;
    r.scalars["factor_linewidth"] = bud.factor_linewidth;
    r.scalars["factor_coupling"] = bud.factor_coupling;
    r.scalars["factor_field"] = bud.factor_field;
    r.scalars["factor_gain"] = bud.factor_gain;
    r.scalars["factor_product"] = bud.factor_linewidth * bud.factor_coupling *
                                  bud.factor_field * bud.factor_gain;
    finalize(r, out_dir, "reflection", cfg, seed);
    return r;
}

RunResult run_noise(const Config& cfg, const std::string& out_dir,
                    unsigned long long seed, unsigned threads) {
    (void)threads;
    ensure_dir(out_dir);
    RunResult r;
    Point pt = load_point(cfg);
    Pumped pp = make_pump(cfg, pt, -1.0);
    PhotonPressureResponse resp(pp.cpl, pt.state, pp.pumps, pt.rf, pt.kappa,
                                pt.kappa_e);
    std::vector<double> W = pump_frame_grid(cfg, pp);
    double omega_p = pt.drive.omega_d - pp.pumps.Omega_dp;
    double omega_s_abs = pt.drive.omega_d + pp.qm.Omega_s;

    auto S_full = pp_output_psd(W, resp, pt.baths, pt.Gamma_e, pt.Gamma_i);
    auto S_eff = pp_output_psd_effective(W, resp, pp.qm, pt.baths, pt.Gamma_e,
                                         pt.Gamma_i);
    std::vector<double> Wd(W.size());
    for (std::size_t i = 0; i < W.size(); ++i)
        Wd[i] = W[i] - pp.pumps.Omega_dp;
    auto S_off = bare_kerr_psd(Wd, pt.state, pt.kappa, pt.kappa_e, pt.flux.K,
                               pt.baths);

    const std::pair<const char*, const std::vector<double>*> psds[] = {
        {"psd_full.csv", &S_full},
        {"psd_effective.csv", &S_eff},
        {"psd_pump_off.csv", &S_off},
    };
    for (const auto& [name, S] : psds) {
        std::vector<std::vector<double>> rows(W.size());
        for (std::size_t i = 0; i < W.size(); ++i)
            rows[i] = {rad_to_hz(omega_p + W[i]),
                       rad_to_hz(omega_p + W[i] - omega_s_abs), (*S)[i]};
        std::string path = join(out_dir, name);
        write_csv(path, {"omega_Hz", "detuning_Hz", "S_nn_quanta"}, rows);
        r.outputs.push_back(path);
    }

    double window = hz_to_rad(cfg.get_double("noise.window_halfwidth_Hz", 0.0));
    OccupationReport occ = occupations_by_integration(
        resp, pp.qm, pt.baths, pt.Gamma_e, pt.Gamma_i, window);
    QuantumNoiseOccupation qn =
        effective_temperatures(pt.state, pp.qm, pt.kappa, pt.flux.K);
    double n_th_RF = pt.baths.n_th_RF(pt.Gamma_e, pt.Gamma_i);
    double n_th_HF = pt.baths.n_th_HF(pt.kappa_e, pt.kappa - pt.kappa_e);
    OccupationReport anl = occupations_analytic(
        pp.cpl.g_eff, pp.qm.G_s, pt.kappa, pt.rf.Gamma0, n_th_RF, n_th_HF,
        qn.n_tilde_q, pt.drive.omega_d + pp.qm.Omega_s);

    nlohmann::json j;
    auto occ_json = [](const OccupationReport& o) {
        nlohmann::json q;
        q["n_th_RF"] = o.n_th_RF;
        q["n_fin_RF"] = o.n_fin_RF;
        q["n_cool_RF"] = o.n_cool_RF;
        q["n_rpsn_RF"] = o.n_rpsn_RF;
        q["n_fin_HF"] = o.n_fin_HF;
        q["n_q_HF_tilde"] = o.n_q_HF_tilde;
        q["n_q_HF_bar"] = o.n_q_HF_bar;
        q["T_eff_K"] = o.T_eff;
        return q;
    };
    j["integrated"] = occ_json(occ);
    j["rate_model"] = occ_json(anl);
    std::string occ_path = join(out_dir, "occupations.json");
    write_text(occ_path, j.dump(2) + "\n");
    r.outputs.push_back(occ_path);

    double peak = 0.0;
    for (double s : S_full) peak = std::max(peak, s);
    r.scalars["C_eff"] = pp.cpl.C_eff;
    r.scalars["g_eff_Hz"] = rad_to_hz(pp.cpl.g_eff);
    r.scalars["n_fin_RF"] = occ.n_fin_RF;
    r.scalars["n_cool_RF"] = occ.n_cool_RF;
    r.scalars["n_rpsn_RF"] = occ.n_rpsn_RF;
    r.scalars["n_fin_HF"] = occ.n_fin_HF;
    r.scalars["n_tilde_q"] = qn.n_tilde_q;
    r.scalars["T_eff_K"] = qn.T_eff;
    r.scalars["psd_peak_quanta"] = peak;
    finalize(r, out_dir, "noise", cfg, seed);
    return r;
}

RunResult run_cooling(const Config& cfg, const std::string& out_dir,
                      unsigned long long seed, unsigned threads) {
    ensure_dir(out_dir);
    RunResult r;
    Point pt = load_point(cfg);
    QuasiModes qm = quasi_modes(pt.state, pt.kappa, pt.kappa_e,
                                pt.flux.omega0, pt.flux.K);
    QuantumNoiseOccupation qn =
        effective_temperatures(pt.state, qm, pt.kappa, pt.flux.K);
    double n_th_RF = pt.baths.n_th_RF(pt.Gamma_e, pt.Gamma_i);
    double n_th_HF = pt.baths.n_th_HF(pt.kappa_e, pt.kappa - pt.kappa_e);
    double omega_s_abs = pt.drive.omega_d + qm.Omega_s;
    double window =
        hz_to_rad(cfg.get_double("cooling.window_halfwidth_Hz", 0.0));

    std::vector<double> Cs = cfg.get_list("cooling.C_list");
    if (Cs.empty())
        throw validation_error("cooling.C_list must not be empty");
    std::vector<std::vector<double>> rows(Cs.size());
    parallel_for(Cs.size(), threads, [&](std::size_t i) {
        Pumped q = make_pump(cfg, pt, Cs[i]);
        PhotonPressureResponse resp(q.cpl, pt.state, q.pumps, pt.rf, pt.kappa,
                                    pt.kappa_e);
        OccupationReport occ = occupations_by_integration(
            resp, q.qm, pt.baths, pt.Gamma_e, pt.Gamma_i, window);
        OccupationReport anl = occupations_analytic(
            q.cpl.g_eff, q.qm.G_s, pt.kappa, pt.rf.Gamma0, n_th_RF, n_th_HF,
            qn.n_tilde_q, omega_s_abs);
        rows[i] = {Cs[i],
                   q.pumps.n_minus,
                   rad_to_hz(std::abs(q.cpl.g_minus)),
                   rad_to_hz(q.cpl.g_eff),
                   q.cpl.C_eff,
                   occ.n_fin_RF,
                   occ.n_cool_RF,
                   occ.n_rpsn_RF,
                   occ.n_fin_HF,
                   occ.n_q_HF_tilde,
                   anl.n_fin_RF,
                   anl.n_fin_HF};
    });
    std::string path = join(out_dir, "cooling.csv");
    write_csv(path,
              {"C_target", "n_minus", "g_minus_Hz", "g_eff_Hz", "C_eff",
               "n_fin_RF", "n_cool_RF", "n_rpsn_RF", "n_fin_HF",
               "n_q_HF_tilde", "n_fin_RF_rate", "n_fin_HF_rate"},
              rows);
    r.outputs.push_back(path);

    const std::vector<double>& last = rows.back();
    r.scalars["n_th_RF"] = n_th_RF;
    r.scalars["n_tilde_q"] = qn.n_tilde_q;
    r.scalars["T_eff_K"] = qn.T_eff;
    r.scalars["G_s"] = qm.G_s;
    r.scalars["end_C_eff"] = last[4];
    r.scalars["end_g_eff_Hz"] = last[3];
    r.scalars["end_n_fin_RF"] = last[5];
    r.scalars["end_n_fin_HF"] = last[8];
    r.scalars["end_n_fin_RF_rate"] = last[10];
    r.scalars["end_n_fin_HF_rate"] = last[11];
    finalize(r, out_dir, "cooling", cfg, seed);
    return r;
}

RunResult run_sensing(const Config& cfg, const std::string& out_dir,
                      unsigned long long seed, unsigned threads) {
    ensure_dir(out_dir);
    RunResult r;
    Point pt = load_point(cfg);
    Pumped pp = make_pump(cfg, pt, -1.0);
    PhotonPressureResponse resp(pp.cpl, pt.state, pp.pumps, pt.rf, pt.kappa,
                                pt.kappa_e);
    std::vector<double> W = pump_frame_grid(cfg, pp);
    double omega_p = pt.drive.omega_d - pp.pumps.Omega_dp;
    double omega_s_abs = pt.drive.omega_d + pp.qm.Omega_s;

    SensingInputs si{pt.state,   pp.pumps,  pp.qm,      pp.cpl, pt.kappa,
                     pt.kappa_e, pt.Phi_zpf, pt.rf.Gamma0, pt.baths.n_add};
    SensingReport imp = imprecision(W, si);
    auto S_nn = pp_output_psd(W, resp, pt.baths, pt.Gamma_e, pt.Gamma_i);
    SensingReport det = flux_spectral_density(W, S_nn, si);

    std::vector<std::vector<double>> spec_rows(W.size());
    for (std::size_t i = 0; i < W.size(); ++i)
        spec_rows[i] = {rad_to_hz(omega_p + W[i]),
                        rad_to_hz(omega_p + W[i] - omega_s_abs),
                        det.S_phi_det[i], imp.S_imp[i]};
    std::string spec_path = join(out_dir, "flux_sensitivity.csv");
    write_csv(spec_path,
              {"omega_Hz", "detuning_Hz", "S_phi_det_Phi0sq_per_Hz",
               "S_imp_Phi0sq_per_Hz"},
              spec_rows);
    r.outputs.push_back(spec_path);

    // drive sweep at fixed input power and fixed C_eff: for each n_d, the
    // detuning follows from kappa_e S_d^2 = n [delta^2 + kappa(n)^2/4]
    LinewidthModel lw = load_linewidth(cfg);
    double kes2 = pt.kappa_e * pt.drive.S_d * pt.drive.S_d;
    double C_fix = pp.cpl.C_eff;
    std::vector<DriveSweepEntry> entries;
    entries.push_back({0.0, lw.kappa_of(0.0), 1.0, 0.0});
    std::vector<double> n_grid =
        logspace(cfg.get_double("sensing.n_min"),
                 cfg.get_double("sensing.n_max"),
                 static_cast<std::size_t>(cfg.get_int("sensing.n_points")));
    for (double n : n_grid) {
        double kn = lw.kappa_of(n);
        double disc = kes2 / n - 0.25 * kn * kn;
        if (disc <= 0) continue;
        double delta = std::sqrt(disc);
        double Delta_d = pt.flux.K * n + delta;
        KerrSteadyState st{n, 0.0, Delta_d, Branch::high,
                           cplx(std::sqrt(n), 0.0)};
        QuasiModes qm2 =
            quasi_modes(st, kn, pt.kappa_e, pt.flux.omega0, pt.flux.K);
        double nq2 =
            effective_temperatures(st, qm2, kn, pt.flux.K).n_tilde_q;
        entries.push_back({n, kn, qm2.G_s, nq2});
    }
    std::vector<double> S_min = imprecision_min_vs_drive(
        entries, pt.kappa_e, C_fix, pt.baths.n_add, pt.Phi_zpf,
        pt.rf.Gamma0);
    std::vector<std::vector<double>> curve_rows(entries.size());
    parallel_for(entries.size(), threads, [&](std::size_t i) {
        const DriveSweepEntry& e = entries[i];
        double base = 2.0 * pt.Phi_zpf * pt.Phi_zpf * e.kappa /
                      (pt.kappa_e * e.G_s * C_fix * pt.rf.Gamma0);
        double S_add = base * (0.5 + pt.baths.n_add);
        double S_jpa = base * 4.0 * (pt.kappa_e / e.kappa) * e.n_tilde_q;
        curve_rows[i] = {e.n_d,  rad_to_hz(e.kappa), e.G_s, e.n_tilde_q,
                         S_min[i], S_add,            S_jpa};
    });
    std::string curve_path = join(out_dir, "imprecision_vs_drive.csv");
    write_csv(curve_path,
              {"n_d", "kappa_Hz", "G_s", "n_tilde_q",
               "S_imp_min_Phi0sq_per_Hz", "added_component",
               "jpa_component"},
              curve_rows);
    r.outputs.push_back(curve_path);

    double best = S_min[0];
    double n_best = 0.0;
    for (std::size_t i = 1; i < S_min.size(); ++i)
        if (S_min[i] < best) {
            best = S_min[i];
            n_best = entries[i].n_d;
        }
    r.scalars["C_eff"] = C_fix;
    r.scalars["S_imp_min_spectrum"] = imp.S_imp_min;
    r.scalars["S_imp_min_curve"] = best;
    r.scalars["n_d_at_min"] = n_best;
    r.scalars["improvement_vs_undriven"] = S_min[0] / best;
    r.scalars["n_JPA_at_res"] = imp.n_JPA_at_res;
    r.scalars["sql"] = imp.sql;
    r.scalars["ratio_to_sql"] = imp.ratio_to_sql;
    finalize(r, out_dir, "sensing", cfg, seed);
    return r;
}

RunResult run_sweep_flux(const Config& cfg, const std::string& out_dir,
                         unsigned long long seed, unsigned threads) {
    (void)threads;
    ensure_dir(out_dir);
    RunResult r;
    CircuitParams cp = load_circuit(cfg);
    LinewidthModel lw = load_linewidth(cfg);

    double phi_min = cfg.get_double("sweep.phi_min");
    double phi_max = cfg.get_double("sweep.phi_max");
    auto points = static_cast<std::size_t>(cfg.get_int("sweep.points"));
    std::vector<double> grid_up = linspace(phi_min, phi_max, points);

    DriveConfig drive;
    if (cfg.has("sweep.omega_d_Hz")) {
        drive.omega_d = hz_to_rad(cfg.get_double("sweep.omega_d_Hz"));
        drive.S_d = cfg.get_double("sweep.S_d");
    } else {
        // anchored calibration: place the drive slightly beyond the
        // anchor-photon-number resonance shift and set the power to fill
        // n = fill_factor * anchor at the bifurcation edge
        double anchor_phi = cfg.get_double("sweep.anchor_phi");
        double anchor_nd = cfg.get_double("sweep.anchor_nd");
        double overshoot = cfg.get_double("sweep.detune_overshoot");
        double fill = cfg.get_double("sweep.fill_factor");
        FluxPoint fpa = flux_point(anchor_phi, cp);
        drive.omega_d = fpa.omega0 + fpa.K * anchor_nd * overshoot;
        double n_f = fill * anchor_nd;
        double kf = lw.kappa_of(n_f);
        drive.S_d = std::sqrt(n_f * kf * kf / (4.0 * lw.kappa_e));
    }
    r.scalars["omega_d_Hz"] = rad_to_hz(drive.omega_d);
    r.scalars["S_d"] = drive.S_d;

    std::string want = cfg.get_string("sweep.direction", "both");
    if (want != "up" && want != "down" && want != "both")
        throw validation_error("sweep.direction must be up, down or both");

    auto emit = [&](SweepDirection dir, const std::vector<double>& grid,
                    const std::string& tag) {
        std::vector<SweepPoint> pts = sweep_flux(drive, grid, dir, cp, lw);
        std::string sweep_path = join(out_dir, "sweep_" + tag + ".csv");
        write_sweep_csv(sweep_path, pts);
        r.outputs.push_back(sweep_path);

        std::vector<std::vector<double>> qrows;
        qrows.reserve(pts.size());
        double max_gs = 0.0;
        double fold_phi = nan_v;
        double prev_nd = nan_v;
        double max_jump = 0.0;
        for (const SweepPoint& sp : pts) {
            double gs = nan_v, oms = nan_v, k1 = nan_v, kie = nan_v,
                   gout = nan_v;
            if (sp.converged) {
                try {
                    QuasiModes qm =
                        quasi_modes(sp.state, sp.kappa_eff, lw.kappa_e,
                                    sp.flux.omega0, sp.flux.K);
                    OutputGains og = output_gain_on_resonance(
                        sp.state, qm, sp.kappa_eff, lw.kappa_e);
                    gs = qm.G_s;
                    oms = rad_to_hz(qm.Omega_s);
                    k1 = rad_to_hz(qm.kappa1);
                    kie = rad_to_hz(qm.kappa_i_eff);
                    gout = 20.0 * std::log10(std::abs(og.G_s_out_exact));
                    max_gs = std::max(max_gs, gs);
                } catch (const solver_error&) {
                    // degenerate quasi-mode region: leave the row blank
                }
                if (!std::isnan(prev_nd) && sp.state.n_d > 0) {
                    double jump = std::abs(sp.state.n_d - prev_nd);
                    if (jump > max_jump) {
                        max_jump = jump;
                        fold_phi = sp.flux.phi_b;
                    }
                }
                prev_nd = sp.state.n_d;
            }
            qrows.push_back({sp.flux.phi_b, sp.state.n_d, gs, oms, k1, kie,
                             gout});
        }
        std::string q_path = join(out_dir, "quasimodes_" + tag + ".csv");
        write_csv(q_path,
                  {"phi_b", "n_d", "G_s", "Omega_s_Hz", "kappa1_Hz",
                   "kappa_i_eff_Hz", "G_out_dB"},
                  qrows);
        r.outputs.push_back(q_path);
        r.scalars["max_G_s_" + tag] = max_gs;
        r.scalars["fold_phi_" + tag] = fold_phi;
        r.scalars["max_nd_jump_" + tag] = max_jump;
    };

    if (want == "up" || want == "both")
        emit(SweepDirection::up, grid_up, "up");
    if (want == "down" || want == "both") {
        std::vector<double> grid_down(grid_up.rbegin(), grid_up.rend());
        emit(SweepDirection::down, grid_down, "down");
    }
    finalize(r, out_dir, "sweep-flux", cfg, seed);
    return r;
}

RunResult run_flux_model(const Config& cfg, const std::string& out_dir,
                         unsigned long long seed, unsigned threads) {
    (void)threads;
    ensure_dir(out_dir);
    RunResult r;
    CircuitParams cp = load_circuit(cfg);
    LinewidthModel lw = load_linewidth(cfg);

    std::vector<double> phis =
        linspace(cfg.get_double("flux_model.phi_min"),
                 cfg.get_double("flux_model.phi_max"),
                 static_cast<std::size_t>(cfg.get_int("flux_model.points")));
    std::vector<std::vector<double>> rows;
    rows.reserve(phis.size());
    for (double phi : phis) {
        try {
            FluxPoint fp = flux_point(phi, cp);
            rows.push_back({fp.phi_b, fp.phi_total, rad_to_hz(fp.omega0),
                            rad_to_hz(fp.K), rad_to_hz(fp.G0),
                            rad_to_hz(fp.g0), rad_to_hz(fp.g_K)});
        } catch (const std::domain_error&) {
            break; // flux arch edge reached
        }
    }
    std::string path = join(out_dir, "flux_model.csv");
    write_csv(path,
              {"phi_b", "phi_total", "omega0_Hz", "K_Hz",
               "G0_Hz_per_Phi0", "g0_Hz", "g_K_Hz"},
              rows);
    r.outputs.push_back(path);

    std::vector<double> ns =
        logspace(cfg.get_double("flux_model.tls_n_min"),
                 cfg.get_double("flux_model.tls_n_max"),
                 static_cast<std::size_t>(cfg.get_int("flux_model.tls_points")));
    std::vector<std::vector<double>> trows(ns.size());
    for (std::size_t i = 0; i < ns.size(); ++i)
        trows[i] = {ns[i],
                    rad_to_hz(tls_linewidth(ns[i], lw.kappa_tls0, lw.tls)),
                    rad_to_hz(lw.kappa_of(ns[i]))};
    std::string tls_path = join(out_dir, "tls_linewidth.csv");
    write_csv(tls_path, {"n_d", "kappa_tls_Hz", "kappa_total_Hz"}, trows);
    r.outputs.push_back(tls_path);

    double mark = cfg.get_double("flux_model.mark_phi", 0.48);
    FluxPoint fpm = flux_point(mark, cp);
    r.scalars["mark_phi"] = mark;
    r.scalars["omega0_mark_Hz"] = rad_to_hz(fpm.omega0);
    r.scalars["K_mark_Hz"] = rad_to_hz(fpm.K);
    r.scalars["g0_mark_Hz"] = rad_to_hz(fpm.g0);
    r.scalars["g_K_mark_Hz"] = rad_to_hz(fpm.g_K);
    r.scalars["kappa_undriven_Hz"] = rad_to_hz(lw.kappa_of(0.0));
    finalize(r, out_dir, "flux-model", cfg, seed);
    return r;
}

RunResult run_quasimodes(const Config& cfg, const std::string& out_dir,
                         unsigned long long seed, unsigned threads) {
    (void)threads;
    ensure_dir(out_dir);
    RunResult r;
    Point pt = load_point(cfg);

    std::vector<double> ns =
        logspace(cfg.get_double("quasi.n_min"), cfg.get_double("quasi.n_max"),
                 static_cast<std::size_t>(cfg.get_int("quasi.n_points")));
    std::vector<std::vector<double>> rows(ns.size());
    for (std::size_t i = 0; i < ns.size(); ++i) {
        double n = ns[i];
        KerrSteadyState st{n, 0.0, pt.state.Delta_d, Branch::high,
                           cplx(std::sqrt(n), 0.0)};
        rows[i] = {n, nan_v, nan_v, nan_v, nan_v, nan_v, nan_v, nan_v, nan_v};
        try {
            QuasiModes qm = quasi_modes(st, pt.kappa, pt.kappa_e,
                                        pt.flux.omega0, pt.flux.K);
            OutputGains og =
                output_gain_on_resonance(st, qm, pt.kappa, pt.kappa_e);
            rows[i] = {n,
                       rad_to_hz(qm.Omega_s),
                       qm.G_s,
                       qm.G_i,
                       rad_to_hz(qm.kappa1),
                       rad_to_hz(qm.kappa2),
                       rad_to_hz(qm.kappa_i_eff),
                       20.0 * std::log10(std::abs(og.G_s_out_exact)),
                       20.0 * std::log10(std::abs(og.G_s_out_approx))};
        } catch (const solver_error&) {
            // degenerate window between the branch edges
        }
    }
    std::string fam_path = join(out_dir, "quasimode_family.csv");
    write_csv(fam_path,
              {"n_d", "Omega_s_Hz", "G_s", "G_i", "kappa1_Hz", "kappa2_Hz",
               "kappa_i_eff_Hz", "G_out_dB", "G_out_approx_dB"},
              rows);
    r.outputs.push_back(fam_path);

    QuasiModes qm = quasi_modes(pt.state, pt.kappa, pt.kappa_e,
                                pt.flux.omega0, pt.flux.K);
    double span = hz_to_rad(cfg.get_double("quasi.span_Hz"));
    auto npts = static_cast<std::size_t>(cfg.get_int("quasi.points"));
    std::vector<double> Wd =
        linspace(qm.Omega_s - 0.5 * span, qm.Omega_s + 0.5 * span, npts);
    auto bare = reflection_bare(Wd, pt.state, pt.kappa, pt.kappa_e,
                                pt.flux.K);
    auto twom = reflection_two_mode(Wd, qm, pt.kappa);
    std::vector<std::vector<double>> crow(Wd.size());
    double max_err = 0.0;
    for (std::size_t i = 0; i < Wd.size(); ++i) {
        double err = std::abs(bare[i] - twom[i]);
        max_err = std::max(max_err, err);
        crow[i] = {rad_to_hz(pt.drive.omega_d + Wd[i]),
                   rad_to_hz(Wd[i] - qm.Omega_s),
                   bare[i].real(),
                   bare[i].imag(),
                   twom[i].real(),
                   twom[i].imag(),
                   err};
    }
    std::string cmp_path = join(out_dir, "reflection_bare_vs_twomode.csv");
    write_csv(cmp_path,
              {"omega_Hz", "detuning_Hz", "re_bare", "im_bare", "re_twomode",
               "im_twomode", "abs_diff"},
              crow);
    r.outputs.push_back(cmp_path);

    OutputGains og =
        output_gain_on_resonance(pt.state, qm, pt.kappa, pt.kappa_e);
    r.scalars["G_s"] = qm.G_s;
    r.scalars["G_i"] = qm.G_i;
    r.scalars["gain_sum_minus_1"] = qm.G_s + qm.G_i - 1.0;
    r.scalars["Omega_s_Hz"] = rad_to_hz(qm.Omega_s);
    r.scalars["kappa1_Hz"] = rad_to_hz(qm.kappa1);
    r.scalars["G_out_dB"] = 20.0 * std::log10(std::abs(og.G_s_out_exact));
    r.scalars["G_out_approx_dB"] =
        20.0 * std::log10(std::abs(og.G_s_out_approx));
    r.scalars["max_twomode_err"] = max_err;
    finalize(r, out_dir, "quasimodes", cfg, seed);
    return r;
}

RunResult run_landscape(const Config& cfg, const std::string& out_dir,
                        unsigned long long seed, unsigned threads) {
    (void)threads;
    ensure_dir(out_dir);
    RunResult r;
    Point pt = load_point(cfg);
    Pumped pp = make_pump(cfg, pt, -1.0);

    std::vector<double> Gs =
        linspace(cfg.get_double("landscape.G_min"),
                 cfg.get_double("landscape.G_max"),
                 static_cast<std::size_t>(cfg.get_int("landscape.G_points")));
    std::vector<double> rs =
        linspace(cfg.get_double("landscape.r_min"),
                 cfg.get_double("landscape.r_max"),
                 static_cast<std::size_t>(cfg.get_int("landscape.r_points")));
    auto M = sql_landscape(Gs, rs, pp.cpl.C_eff, pt.baths.n_add);

    std::vector<std::string> cols{"G_s"};
    for (double rr : rs) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "r_%.6g", rr);
        cols.push_back(buf);
    }
    std::vector<std::vector<double>> rows(Gs.size());
    for (std::size_t i = 0; i < Gs.size(); ++i) {
        rows[i].push_back(Gs[i]);
        for (std::size_t j = 0; j < rs.size(); ++j)
            rows[i].push_back(M[i][j]);
    }
    std::string ls_path = join(out_dir, "sql_landscape.csv");
    write_csv(ls_path, cols, rows);
    r.outputs.push_back(ls_path);

    std::vector<std::vector<double>> locus(rs.size());
    for (std::size_t j = 0; j < rs.size(); ++j) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < Gs.size(); ++i)
            if (M[i][j] < M[best][j]) best = i;
        locus[j] = {rs[j], Gs[best], M[best][j]};
    }
    std::string locus_path = join(out_dir, "sql_landscape_locus.csv");
    write_csv(locus_path, {"kappa_ratio", "G_s_opt", "ratio_min"}, locus);
    r.outputs.push_back(locus_path);

    double r_dev = pt.kappa_e / pt.kappa;
    auto dev = sql_landscape({pp.qm.G_s}, {r_dev}, pp.cpl.C_eff,
                             pt.baths.n_add);
    r.scalars["device_ratio_to_sql"] = dev[0][0];
    double best_ratio = 1e300;
    for (const auto& row : M)
        for (double v : row) best_ratio = std::min(best_ratio, v);
    r.scalars["best_ratio_on_grid"] = best_ratio;

    // synthetic single-quasi-mode fit against the dressed full model
    PhotonPressureResponse resp(pp.cpl, pt.state, pp.pumps, pt.rf, pt.kappa,
                                pt.kappa_e);
    double span = hz_to_rad(cfg.get_double("synth.span_Hz"));
    auto npts = static_cast<std::size_t>(cfg.get_int("synth.points"));
    double W0 = pp.pumps.Omega_dp + pp.qm.Omega_s;
    std::vector<double> W = linspace(W0 - 0.5 * span, W0 + 0.5 * span, npts);
    auto clean = reflection_full(W, resp, ReflectionRoute::dressed);
    GaussianRng rng(seed);
    auto noisy =
        add_complex_noise(clean, cfg.get_double("synth.sigma"), rng);
    double omega_p = pt.drive.omega_d - pp.pumps.Omega_dp;
    std::vector<double> omega_abs(W.size());
    for (std::size_t i = 0; i < W.size(); ++i) omega_abs[i] = omega_p + W[i];
    std::string trace_path = join(out_dir, "effective_fit_trace.csv");
    write_reflection_csv(trace_path, omega_abs, noisy,
                         pt.drive.omega_d + pp.qm.Omega_s);
    r.outputs.push_back(trace_path);

    FitResult fit = fit_effective_model(W, noisy, W0);
    std::string fit_path = join(out_dir, "effective_fit.json");
    write_fit_json(fit_path, fit);
    r.outputs.push_back(fit_path);
    add_fit_scalars(r, "fit_", fit);
    if (fit.converged) {
        double g = fit.parameters.at("g_eff");
        double kap = fit.parameters.at("kappa");
        double Gam = fit.parameters.at("Gamma0");
        r.scalars["fit_C_eff"] = 4.0 * g * g / (kap * Gam);
    }
    r.scalars["true_C_eff"] = pp.cpl.C_eff;
    finalize(r, out_dir, "landscape", cfg, seed);
    return r;
}

RunResult run_fit_suite(const Config& cfg, const std::string& out_dir,
                        unsigned long long seed, unsigned threads) {
    (void)threads;
    ensure_dir(out_dir);
    RunResult r;
    Point pt = load_point(cfg);
    GaussianRng rng(seed);

    // driven reflection with instrument background, then the standard chain:
    // background fit, correction, operating-point fit
    {
        double span = hz_to_rad(cfg.get_double("synth.reflection_span_Hz"));
        auto npts = static_cast<std::size_t>(
            cfg.get_int("synth.reflection_points"));
        std::vector<double> Wd = linspace(-0.5 * span, 0.5 * span, npts);
        auto ideal = reflection_bare(Wd, pt.state, pt.kappa, pt.kappa_e,
                                     pt.flux.K);
        std::vector<double> omega_abs(Wd.size());
        for (std::size_t i = 0; i < Wd.size(); ++i)
            omega_abs[i] = pt.drive.omega_d + Wd[i];
        BackgroundModel bg;
        bg.a0 = cfg.get_double("synth.bg_a0");
        bg.a1 = cfg.get_double("synth.bg_a1");
        bg.a2 = cfg.get_double("synth.bg_a2");
        bg.phi0 = cfg.get_double("synth.bg_phi0");
        bg.phi1 = cfg.get_double("synth.bg_phi1");
        bg.theta = cfg.get_double("synth.bg_theta");
        bg.omega_ref = pt.drive.omega_d;
        auto measured = apply_background(bg, omega_abs, ideal);
        measured = add_complex_noise(
            measured, cfg.get_double("synth.reflection_sigma"), rng);
        std::string meas_path = join(out_dir, "reflection_measured.csv");
        write_reflection_csv(meas_path, omega_abs, measured,
                             pt.drive.omega_d);
        r.outputs.push_back(meas_path);

        QuasiModes qm = quasi_modes(pt.state, pt.kappa, pt.kappa_e,
                                    pt.flux.omega0, pt.flux.K);
        double half = hz_to_rad(cfg.get_double("synth.mask_halfwidth_Hz"));
        std::vector<bool> mask(Wd.size());
        for (std::size_t i = 0; i < Wd.size(); ++i)
            mask[i] = std::abs(std::abs(Wd[i]) + qm.Omega_s) < half;
        FitResult bg_fit_unused; // background model is returned separately
        BackgroundModel bg_fit = fit_background(omega_abs, measured, mask);
        auto corrected = correct_background(bg_fit, omega_abs, measured);
        std::string corr_path = join(out_dir, "reflection_corrected.csv");
        write_reflection_csv(corr_path, omega_abs, corrected,
                             pt.drive.omega_d);
        r.outputs.push_back(corr_path);

        KerrReflectionFixed fixed{pt.flux.omega0, pt.kappa_e, pt.flux.K,
                                  pt.drive.omega_d};
        FitResult fit = fit_reflection_kerr(omega_abs, corrected, fixed);
        std::string fit_path = join(out_dir, "reflection_fit.json");
        write_fit_json(fit_path, fit);
        r.outputs.push_back(fit_path);
        add_fit_scalars(r, "reflection_", fit);
        r.scalars["reflection_kappa_true_Hz"] = rad_to_hz(pt.kappa);
        r.scalars["reflection_n_d_true"] = pt.state.n_d;
        if (fit.converged) {
            r.scalars["reflection_kappa_fit_Hz"] =
                rad_to_hz(fit.parameters.at("kappa"));
            r.scalars["reflection_n_d_fit"] = fit.parameters.at("n_d");
        }
    }

    // pumped output noise with multiplicative detector scatter, thermal
    // occupation refit
    {
        Pumped pp = make_pump(cfg, pt, -1.0);
        PhotonPressureResponse resp(pp.cpl, pt.state, pp.pumps, pt.rf,
                                    pt.kappa, pt.kappa_e);
        double span = hz_to_rad(cfg.get_double("synth.noise_span_Hz"));
        auto npts =
            static_cast<std::size_t>(cfg.get_int("synth.noise_points"));
        double W0 = pp.pumps.Omega_dp + pp.qm.Omega_s;
        std::vector<double> W =
            linspace(W0 - 0.5 * span, W0 + 0.5 * span, npts);
        auto psd = pp_output_psd(W, resp, pt.baths, pt.Gamma_e, pt.Gamma_i);
        double rel = cfg.get_double("synth.noise_rel_sigma");
        std::vector<double> noisy(psd.size());
        for (std::size_t i = 0; i < psd.size(); ++i)
            noisy[i] =
                std::max(psd[i] * (1.0 + rel * rng.gaussian()), 1e-9);
        double omega_p = pt.drive.omega_d - pp.pumps.Omega_dp;
        std::vector<std::vector<double>> rows(W.size());
        for (std::size_t i = 0; i < W.size(); ++i)
            rows[i] = {rad_to_hz(omega_p + W[i]),
                       rad_to_hz(W[i] - W0), noisy[i]};
        std::string meas_path = join(out_dir, "noise_measured.csv");
        write_csv(meas_path, {"omega_Hz", "detuning_Hz", "S_nn_quanta"},
                  rows);
        r.outputs.push_back(meas_path);

        FitResult fit = fit_noise_spectrum(W, noisy, resp, pt.baths,
                                           pt.Gamma_e, pt.Gamma_i);
        std::string fit_path = join(out_dir, "noise_fit.json");
        write_fit_json(fit_path, fit);
        r.outputs.push_back(fit_path);
        add_fit_scalars(r, "noise_", fit);
        r.scalars["noise_n_th_RF_true"] =
            pt.baths.n_th_RF(pt.Gamma_e, pt.Gamma_i);
    }
    finalize(r, out_dir, "fit-suite", cfg, seed);
    return r;
}

RunResult run_fit(const Config& cfg, const std::string& out_dir,
                  unsigned long long seed, unsigned threads) {
    (void)threads;
    ensure_dir(out_dir);
    RunResult r;
    std::string kind = cfg.get_string("fit.kind");
    CsvTable table = read_csv(cfg.get_string("fit.trace"));
    std::vector<double> omega = table.column("omega_Hz");
    for (double& w : omega) w = hz_to_rad(w);

    auto complex_trace = [&]() {
        std::vector<double> re = table.column("re_S11");
        std::vector<double> im = table.column("im_S11");
        std::vector<cplx> s(re.size());
        for (std::size_t i = 0; i < re.size(); ++i) s[i] = cplx(re[i], im[i]);
        return s;
    };

    if (kind == "kerr_reflection") {
        KerrReflectionFixed fixed{
            hz_to_rad(cfg.get_double("fit.omega0_Hz")),
            hz_to_rad(cfg.get_double("fit.kappa_e_Hz")),
            hz_to_rad(cfg.get_double("fit.K_Hz")),
            hz_to_rad(cfg.get_double("fit.omega_d_Hz"))};
        FitResult fit = fit_reflection_kerr(omega, complex_trace(), fixed);
        std::string path = join(out_dir, "fit_result.json");
        write_fit_json(path, fit);
        r.outputs.push_back(path);
        add_fit_scalars(r, "", fit);
    } else if (kind == "effective") {
        double omega_ref = hz_to_rad(cfg.get_double("fit.omega_ref_Hz"));
        std::vector<double> W(omega.size());
        for (std::size_t i = 0; i < omega.size(); ++i)
            W[i] = omega[i] - omega_ref;
        FitResult fit = fit_effective_model(
            W, complex_trace(),
            hz_to_rad(cfg.get_double("fit.Omega_s_pump_frame_Hz")));
        std::string path = join(out_dir, "fit_result.json");
        write_fit_json(path, fit);
        r.outputs.push_back(path);
        add_fit_scalars(r, "", fit);
    } else if (kind == "noise") {
        Point pt = load_point(cfg);
        Pumped pp = make_pump(cfg, pt, -1.0);
        PhotonPressureResponse resp(pp.cpl, pt.state, pp.pumps, pt.rf,
                                    pt.kappa, pt.kappa_e);
        double omega_p = pt.drive.omega_d - pp.pumps.Omega_dp;
        std::vector<double> W(omega.size());
        for (std::size_t i = 0; i < omega.size(); ++i)
            W[i] = omega[i] - omega_p;
        FitResult fit =
            fit_noise_spectrum(W, table.column("S_nn_quanta"), resp,
                               pt.baths, pt.Gamma_e, pt.Gamma_i);
        std::string path = join(out_dir, "fit_result.json");
        write_fit_json(path, fit);
        r.outputs.push_back(path);
        add_fit_scalars(r, "", fit);
    } else if (kind == "background") {
        double center = hz_to_rad(cfg.get_double("fit.mask_center_Hz"));
        double half = hz_to_rad(cfg.get_double("fit.mask_halfwidth_Hz"));
        std::vector<bool> mask(omega.size());
        for (std::size_t i = 0; i < omega.size(); ++i)
            mask[i] = std::abs(omega[i] - center) < half;
        auto s11 = complex_trace();
        BackgroundModel bg = fit_background(omega, s11, mask);
        nlohmann::json j;
        j["a0"] = bg.a0;
        j["a1"] = bg.a1;
        j["a2"] = bg.a2;
        j["phi0"] = bg.phi0;
        j["phi1"] = bg.phi1;
        j["theta"] = bg.theta;
        j["omega_ref_Hz"] = rad_to_hz(bg.omega_ref);
        std::string path = join(out_dir, "fit_result.json");
        write_text(path, j.dump(2) + "\n");
        r.outputs.push_back(path);
        auto corrected = correct_background(bg, omega, s11);
        std::string corr = join(out_dir, "trace_corrected.csv");
        write_reflection_csv(corr, omega, corrected, center);
        r.outputs.push_back(corr);
        r.scalars["a0"] = bg.a0;
        r.scalars["theta"] = bg.theta;
    } else {
        throw validation_error("fit.kind must be one of kerr_reflection, "
                               "effective, noise, background");
    }
    finalize(r, out_dir, "fit", cfg, seed);
    return r;
}

RunResult run_oracle_check(const Config& cfg, const std::string& out_dir,
                           unsigned long long seed, unsigned threads) {
    (void)threads;
    ensure_dir(out_dir);
    RunResult r;
    Point pt = load_point(cfg);

    double grid_df = hz_to_rad(cfg.get_double("oracle.grid_df_Hz", 50e3));
    auto n_probe =
        static_cast<std::size_t>(cfg.get_int("oracle.n_probe", 12));
    double span = hz_to_rad(cfg.get_double("oracle.span_Hz"));
    double probe_rel = cfg.get_double("oracle.probe_rel", 0.01);

    TdParams base;
    base.omega_ref = pt.drive.omega_d;
    base.omega0 = pt.flux.omega0;
    base.K = pt.flux.K;
    base.kappa = pt.kappa;
    base.kappa_e = pt.kappa_e;
    base.G0 = pt.flux.G0;
    base.G_K = pt.flux.G_K;
    base.Phi_zpf = pt.Phi_zpf;
    base.Omega0 = pt.rf.Omega0;
    base.Gamma0 = pt.rf.Gamma0;
    base.tones = {{pt.drive.omega_d, pt.drive.S_d, 0.0, false}};
    double mult_k = cfg.get_double("oracle.settle_kappa_mult", 40.0);
    double mult_g = cfg.get_double("oracle.settle_gamma_mult", 8.0);
    base.t_settle =
        std::max(mult_k / pt.kappa, mult_g / pt.rf.Gamma0);
    base.t_measure =
        cfg.get_double("oracle.measure_periods", 1.0) * two_pi / grid_df;
    base.n_samples = static_cast<std::size_t>(
        cfg.get_int("oracle.n_samples", 1 << 17));

    // steady-state cross-check: every stable cubic root must be reproduced
    // by the dynamics (vacuum ramp-up for the lowest root, fixed-point
    // initialization for the others)
    auto roots =
        steady_states(pt.drive, pt.flux, pt.kappa, pt.kappa_e);
    std::vector<std::vector<double>> srows;
    double max_steady_err = 0.0;
    for (std::size_t i = 0; i < roots.size(); ++i) {
        if (roots[i].branch == Branch::middle_unstable) continue;
        TdParams p2 = base;
        p2.coupled = false;
        p2.subtract_static = false;
        bool lowest = (i == 0);
        p2.a_init = lowest ? cplx(0.0)
                           : td_fixed_point(p2, roots[i].n_d);
        Trajectory traj = integrate_cavity(p2);
        double n_td = 0.0;
        for (const cplx& a : traj.alpha) n_td += std::norm(a);
        n_td /= static_cast<double>(traj.alpha.size());
        double rel = std::abs(n_td - roots[i].n_d) /
                     std::max(roots[i].n_d, 1e-12);
        max_steady_err = std::max(max_steady_err, rel);
        srows.push_back({static_cast<double>(i), roots[i].n_d, n_td, rel});
    }
    std::string steady_path = join(out_dir, "oracle_steady_states.csv");
    write_csv(steady_path, {"root_index", "n_root", "n_td", "rel_err"},
              srows);
    r.outputs.push_back(steady_path);
    r.scalars["max_steady_rel_err"] = max_steady_err;

    double S_pr = probe_rel * std::sqrt(std::max(pt.state.n_d, 1.0)) *
                  pt.kappa / std::sqrt(pt.kappa_e);

    auto probe_offsets = [&](double center) {
        std::vector<double> Wd(n_probe);
        for (std::size_t i = 0; i < n_probe; ++i) {
            double off = center - 0.5 * span +
                         span * static_cast<double>(i) /
                             static_cast<double>(n_probe - 1);
            off = snap_to_grid(off, grid_df);
            if (std::abs(off) < 0.5 * grid_df) off = grid_df; // avoid drive
            Wd[i] = off;
        }
        return Wd;
    };

    QuasiModes qm = quasi_modes(pt.state, pt.kappa, pt.kappa_e,
                                pt.flux.omega0, pt.flux.K);

    auto compare = [&](const TdParams& params,
                       const std::vector<double>& Wd_probe,
                       const std::vector<cplx>& fd,
                       const std::string& name, const std::string& tag) {
        std::vector<double> probe_abs(Wd_probe.size());
        for (std::size_t i = 0; i < Wd_probe.size(); ++i)
            probe_abs[i] = pt.drive.omega_d + Wd_probe[i];
        TdReflection td = probe_response_td(params, probe_abs, S_pr, grid_df,
                                            pt.state.n_d);
        double max_err = 0.0, scale = 0.0;
        std::vector<std::vector<double>> rows(Wd_probe.size());
        for (std::size_t i = 0; i < Wd_probe.size(); ++i) {
            double err = std::abs(td.s11[i] - fd[i]);
            max_err = std::max(max_err, err);
            scale = std::max(scale, std::abs(fd[i]));
            rows[i] = {rad_to_hz(probe_abs[i]), td.s11[i].real(),
                       td.s11[i].imag(), fd[i].real(), fd[i].imag(), err};
        }
        std::string path = join(out_dir, name);
        write_csv(path,
                  {"omega_Hz", "re_S11_td", "im_S11_td", "re_S11_fd",
                   "im_S11_fd", "abs_diff"},
                  rows);
        r.outputs.push_back(path);
        r.scalars[tag + "_max_abs_err"] = max_err;
        r.scalars[tag + "_scale"] = scale;
        r.scalars[tag + "_rel_err"] = max_err / scale;
    };

    if (cfg.get_bool("oracle.run_bare", true)) {
        std::vector<double> Wd = probe_offsets(qm.Omega_s);
        auto fd = reflection_bare(Wd, pt.state, pt.kappa, pt.kappa_e,
                                  pt.flux.K);
        TdParams pb = base;
        pb.coupled = false;
        pb.subtract_static = false;
        compare(pb, Wd, fd, "oracle_bare.csv", "bare");
    }

    if (cfg.get_bool("oracle.run_coupled", true)) {
        Pumped pp = make_pump(cfg, pt, -1.0);
        double resid = std::remainder(pp.pumps.Omega_dp, grid_df);
        if (std::abs(resid) > 1e-6 * grid_df)
            throw validation_error(
                "oracle: pump offset must sit on the demodulation grid "
                "(set pump.snap_Hz = oracle.grid_df_Hz)");
        PhotonPressureResponse resp(pp.cpl, pt.state, pp.pumps, pt.rf,
                                    pt.kappa, pt.kappa_e);
        std::vector<double> Wd = probe_offsets(qm.Omega_s);
        std::vector<double> Wp(Wd.size());
        for (std::size_t i = 0; i < Wd.size(); ++i)
            Wp[i] = Wd[i] + pp.pumps.Omega_dp;
        auto fd = reflection_full(Wp, resp, ReflectionRoute::dressed);
        TdParams pc = base;
        pc.coupled = true;
        pc.subtract_static = true;
        pc.tones.push_back(
            {pt.drive.omega_d - pp.pumps.Omega_dp, pp.S_p, 0.0, false});
        compare(pc, Wd, fd, "oracle_coupled.csv", "coupled");
        r.scalars["C_eff"] = pp.cpl.C_eff;
    }

    finalize(r, out_dir, "oracle-check", cfg, seed);
    return r;
}

namespace {

const char* preset_point_i = R"(
# large-gain operating point: n_d = 4700 on the high branch, signal gain 4
[point]
omega0_Hz = 7.2218e9
kappa_Hz = 225e3
kappa_e_Hz = 80e3
kappa_undriven_Hz = 400e3
K_Hz = -5e3
n_d = 4700
Delta_d_Hz = -23256470
branch = high
g0_Hz = -120e3
g_K_Hz = -4.83
Phi_zpf = 635e-6
phi_b = 0.48

[rf]
Omega0_Hz = 452.53e6
Gamma_e_Hz = 22.5e3
Gamma_i_Hz = 22.5e3

[baths]
n_e_HF = 0
n_i_HF = 0
n_e_RF = 15
n_i_RF = 15
n_add = 15

[pump]
place = signal_red_sideband
C_eff = 0.8
snap_Hz = 50e3
)";

const char* preset_circuit = R"(
[circuit]
omega0_sweetspot_Hz = 7.25683e9
Lambda = 0.946
beta_L = 1.07
C_HF_F = 1.3e-12
L_HF_H = 370e-12
L_j0_H = 40e-12
Phi_zpf = 635e-6
Omega0_RF_Hz = 452.53e6
Gamma_e_Hz = 22.5e3
Gamma_i_Hz = 22.5e3
kappa_base_Hz = 400e3
kappa_e_base_Hz = 80e3
K_RF_Hz = -1

[linewidth]
kappa_e_Hz = 80e3
kappa_i_residual_Hz = 119.9e3
kappa_tls0_Hz = 200.1e3
n_cr = 75
Gamma2_Hz = 2.5e6
Delta_tls_Hz = 0
)";

std::string preset_fig2() {
    return std::string(preset_circuit) + R"(
[sweep]
phi_min = 0.44
phi_max = 0.535
points = 191
direction = both
anchor_phi = 0.48
anchor_nd = 4700
detune_overshoot = 1.015
fill_factor = 1.02
)";
}

std::string preset_fig3() {
    return std::string(preset_point_i) + R"(
[grid]
center = signal
span_Hz = 3e6
points = 1201

[reflection]
C_list = 0.05, 0.1, 0.2, 0.4, 0.8
)";
}

std::string preset_fig4() {
    return std::string(preset_point_i) + R"(
[grid]
center = signal
span_Hz = 4e6
points = 1601

[sensing]
n_min = 50
n_max = 30000
n_points = 121

[linewidth]
kappa_e_Hz = 80e3
kappa_i_residual_Hz = 119.9e3
kappa_tls0_Hz = 200.1e3
n_cr = 75
Gamma2_Hz = 2.5e6
Delta_tls_Hz = 0
)";
}

std::string preset_fig5() {
    return std::string(preset_point_i) + R"(
[grid]
center = signal
span_Hz = 3e6
points = 801

[cooling]
C_list = 0.1, 0.25, 0.5, 1, 1.5, 2, 3, 4, 5, 6, 7, 8
)";
}

std::string preset_s3() {
    return std::string(preset_circuit) + R"(
[flux_model]
phi_min = 0
phi_max = 0.535
points = 268
tls_n_min = 0.01
tls_n_max = 1e5
tls_points = 101
mark_phi = 0.48
)";
}

// medium-gain operating point: n_d = 1650 at the larger flux bias,
// signal gain 2.3
const char* preset_point_ii = R"(
[point]
omega0_Hz = 7.20495e9
kappa_Hz = 250e3
kappa_e_Hz = 80e3
kappa_undriven_Hz = 450e3
K_Hz = -4e3
n_d = 1650
Delta_d_Hz = -6329618.5
branch = high
g0_Hz = -150e3
g_K_Hz = -3.03
Phi_zpf = 635e-6
phi_b = 0.52

[rf]
Omega0_Hz = 452.53e6
Gamma_e_Hz = 22.5e3
Gamma_i_Hz = 22.5e3

[baths]
n_e_HF = 0
n_i_HF = 0
n_e_RF = 14
n_i_RF = 14
n_add = 15

[pump]
place = signal_red_sideband
C_eff = 2
snap_Hz = 50e3
)";

std::string preset_s6() {
    return std::string(preset_point_ii) + R"(
[synth]
reflection_span_Hz = 8e6
reflection_points = 801
reflection_sigma = 0.004
mask_halfwidth_Hz = 0.6e6
noise_span_Hz = 5e6
noise_points = 601
noise_rel_sigma = 0.02
bg_a0 = 0.95
bg_a1 = 6e-10
bg_a2 = 1.6e-17
bg_phi0 = 0.4
bg_phi1 = 2.4e-8
bg_theta = 0.04
)";
}

std::string preset_s7() {
    return std::string(preset_point_i) + R"(
[quasi]
n_min = 10
n_max = 10000
n_points = 301
span_Hz = 4.5e6
points = 901
)";
}

std::string preset_s8() {
    return std::string(preset_point_i) + R"(
[landscape]
G_min = 1.05
G_max = 8
G_points = 28
r_min = 0.05
r_max = 0.95
r_points = 19

[synth]
span_Hz = 2.4e6
points = 601
sigma = 0.003
)";
}

// fast self-contained setup for the time-domain cross-check: deep-bistable
// drive, sideband-resolved low-frequency mode, moderate coupling
const char* preset_oracle = R"(
[point]
omega0_Hz = 6.0e9
kappa_Hz = 200e3
kappa_e_Hz = 80e3
K_Hz = -5e3
n_d = 300
Delta_d_Hz = -1408900
branch = high
g0_Hz = -100e3
g_K_Hz = -3
Phi_zpf = 635e-6

[rf]
Omega0_Hz = 5e6
Gamma_e_Hz = 25e3
Gamma_i_Hz = 25e3

[baths]
n_e_HF = 0
n_i_HF = 0
n_e_RF = 0
n_i_RF = 0
n_add = 0

[pump]
place = signal_red_sideband
C_eff = 0.5
snap_Hz = 50e3

[oracle]
grid_df_Hz = 50e3
n_probe = 12
span_Hz = 1.2e6
probe_rel = 0.01
settle_kappa_mult = 40
settle_gamma_mult = 8
measure_periods = 1
run_bare = true
run_coupled = true
)";

} // namespace

std::string preset_config_text(const std::string& name) {
    if (name == "fig2") return preset_fig2();
    if (name == "fig3") return preset_fig3();
    if (name == "fig4") return preset_fig4();
    if (name == "fig5") return preset_fig5();
    if (name == "s3") return preset_s3();
    if (name == "s6") return preset_s6();
    if (name == "s7") return preset_s7();
    if (name == "s8") return preset_s8();
    if (name == "oracle") return preset_oracle;
    throw validation_error(
        "unknown preset '" + name +
        "' (expected fig2, fig3, fig4, fig5, s3, s6, s7, s8 or oracle)");
}

RunResult run_preset(const std::string& name, const std::string& out_dir,
                     unsigned long long seed, unsigned threads) {
    Config cfg = Config::from_string(preset_config_text(name));
    if (name == "fig2") return run_sweep_flux(cfg, out_dir, seed, threads);
    if (name == "fig3") return run_reflection(cfg, out_dir, seed, threads);
    if (name == "fig4") return run_sensing(cfg, out_dir, seed, threads);
    if (name == "fig5") return run_cooling(cfg, out_dir, seed, threads);
    if (name == "s3") return run_flux_model(cfg, out_dir, seed, threads);
    if (name == "s6") return run_fit_suite(cfg, out_dir, seed, threads);
    if (name == "s7") return run_quasimodes(cfg, out_dir, seed, threads);
    if (name == "s8") return run_landscape(cfg, out_dir, seed, threads);
    if (name == "oracle")
        return run_oracle_check(cfg, out_dir, seed, threads);
    throw validation_error("unknown preset: " + name);
}

} // namespace ppk
