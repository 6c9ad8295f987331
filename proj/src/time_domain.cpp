#include "ppk/time_domain.hpp"

#include "ppk/constants.hpp"

#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

namespace ppk {

namespace {

using state_type = std::array<double, 4>; // re a, im a, phi, dphi/dt

struct ToneTerm {
    double Omega = 0.0; // offset from omega_ref
    cplx amp;           // i sqrt(kappa_e) S exp(i theta)
};

struct CavitySystem {
    const TdParams* p = nullptr;
    std::vector<ToneTerm> tones;
    bool evolve_phi = false;
    double n_ref = 0.0;  // static-force reference <n>
    double n2_ref = 0.0; // static-force reference <n^2>

    void operator()(const state_type& y, state_type& dydt, double t) const {
        const cplx a(y[0], y[1]);
        const double n = std::norm(a);
        const double phi = evolve_phi ? y[2] : 0.0;

        cplx drive(0.0, 0.0);
        for (const ToneTerm& tone : tones)
            drive += tone.amp * std::polar(1.0, tone.Omega * t);

        const double detune =
            p->omega0 + p->K * n + (p->G0 + p->G_K * n) * phi - p->omega_ref;
        const cplx da = cplx(-0.5 * p->kappa, detune) * a + drive;
        dydt[0] = da.real();
        dydt[1] = da.imag();

        if (evolve_phi) {
            const double g0 = p->G0 * p->Phi_zpf;
            const double g_K = p->G_K * p->Phi_zpf;
            double force = -2.0 * p->Omega0 * p->Phi_zpf *
                           (g0 * (n - n_ref) +
                            0.5 * g_K * (n * n - n2_ref));
            dydt[2] = y[3];
            dydt[3] = -p->Omega0 * p->Omega0 * y[2] - p->Gamma0 * y[3] + force;
        } else {
            dydt[2] = 0.0;
            dydt[3] = 0.0;
        }
    }
};

void validate(const TdParams& p) {
    if (p.kappa <= 0.0 || p.kappa_e <= 0.0 || p.kappa_e > p.kappa)
        throw validation_error("time_domain: need 0 < kappa_e <= kappa");
    if (p.coupled && (p.Omega0 <= 0.0 || p.Gamma0 <= 0.0 || p.Phi_zpf <= 0.0))
        throw validation_error(
            "time_domain: coupled run needs positive Omega0, Gamma0, Phi_zpf");
    if (p.t_measure <= 0.0 || p.t_settle < 0.0)
        throw validation_error("time_domain: bad time window");
    if (p.n_samples < 2)
        throw validation_error("time_domain: need at least 2 samples");
    for (const Tone& t : p.tones)
        if (t.S < 0.0)
            throw validation_error("time_domain: tone amplitudes must be >= 0");
}

std::vector<ToneTerm> tone_terms(const TdParams& p, bool include_probes) {
    std::vector<ToneTerm> out;
    for (const Tone& t : p.tones) {
        if (t.probe && !include_probes) continue;
        ToneTerm term;
        term.Omega = t.omega - p.omega_ref;
        term.amp = cplx(0.0, std::sqrt(p.kappa_e)) * t.S *
                   std::polar(1.0, t.theta);
        out.push_back(term);
    }
    return out;
}

// mean n and n^2 of the drive-only steady state, for force subtraction
void static_reference(const TdParams& p, double& n_ref, double& n2_ref) {
    TdParams pre = p;
    pre.coupled = false;
    pre.subtract_static = false;
    pre.n_samples = std::min<std::size_t>(p.n_samples, std::size_t(1) << 15);
    pre.tones.erase(std::remove_if(pre.tones.begin(), pre.tones.end(),
                                   [](const Tone& t) { return t.probe; }),
                    pre.tones.end());
    const Trajectory traj = integrate_cavity(pre);
    double s1 = 0.0, s2 = 0.0;
    for (const cplx& a : traj.alpha) {
        const double n = std::norm(a);
        s1 += n;
        s2 += n * n;
    }
    n_ref = s1 / double(traj.alpha.size());
    n2_ref = s2 / double(traj.alpha.size());
}

} // namespace

cplx td_fixed_point(const TdParams& params, double n_hint) {
    validate(params);
    cplx drive(0.0, 0.0);
    for (const Tone& t : params.tones)
        if (!t.probe && t.omega == params.omega_ref)
            drive += cplx(0.0, std::sqrt(params.kappa_e)) * t.S *
                     std::polar(1.0, t.theta);
    if (std::abs(drive) == 0.0) return cplx(0.0, 0.0);

    // seed at the hinted photon number with the linear-response phase
    const auto f = [&](const cplx& a) {
        const double detune =
            params.omega0 + params.K * std::norm(a) - params.omega_ref;
        return cplx(-0.5 * params.kappa, detune) * a + drive;
    };
    const double d0 = params.omega0 + params.K * n_hint - params.omega_ref;
    cplx a = drive / cplx(0.5 * params.kappa, -d0);
    if (n_hint > 0.0 && std::abs(a) > 0.0)
        a *= std::sqrt(n_hint) / std::abs(a);

    for (int iter = 0; iter < 200; ++iter) {
        const cplx r = f(a);
        if (std::abs(r) <= 1e-12 * std::max(1.0, std::abs(drive))) return a;
        // numeric 2x2 Jacobian in (re a, im a)
        const double h = std::max(1e-8 * std::abs(a), 1e-12);
        const cplx fx = (f(a + h) - f(a - h)) / (2.0 * h);
        const cplx fy = (f(a + cplx(0.0, h)) - f(a - cplx(0.0, h))) / (2.0 * h);
        const double j11 = fx.real(), j12 = fy.real();
        const double j21 = fx.imag(), j22 = fy.imag();
        const double det = j11 * j22 - j12 * j21;
        if (std::abs(det) < 1e-300) break;
        const double dx = (-r.real() * j22 + r.imag() * j12) / det;
        const double dy = (-j11 * r.imag() + j21 * r.real()) / det;
        double scale = 1.0;
        for (int half = 0; half < 60; ++half) {
            const cplx trial = a + scale * cplx(dx, dy);
            if (std::abs(f(trial)) < std::abs(r)) {
                a = trial;
                break;
            }
            scale *= 0.5;
        }
        if (scale < 1e-17) break;
    }
    const cplx r = f(a);
    if (std::abs(r) > 1e-9 * std::max(1.0, std::abs(drive))) {
        std::ostringstream msg;
        msg << "td_fixed_point: Newton residual " << std::abs(r)
            << " did not converge from n_hint " << n_hint;
        throw solver_error(msg.str());
    }
    return a;
}

Trajectory integrate_cavity(const TdParams& params) {
    validate(params);
    namespace ode = boost::numeric::odeint;

    CavitySystem sys;
    sys.p = &params;
    sys.tones = tone_terms(params, true);
    sys.evolve_phi = params.coupled;
    if (params.coupled && params.subtract_static) {
        if (params.static_n_ref >= 0.0 && params.static_n2_ref >= 0.0) {
            sys.n_ref = params.static_n_ref;
            sys.n2_ref = params.static_n2_ref;
        } else {
            static_reference(params, sys.n_ref, sys.n2_ref);
        }
    }

    double Omega_max = params.kappa;
    for (const ToneTerm& t : sys.tones)
        Omega_max = std::max(Omega_max, std::abs(t.Omega));
    if (params.coupled) Omega_max = std::max(Omega_max, params.Omega0);
    const double dt0 = 0.05 / Omega_max;

    state_type y = {params.a_init.real(), params.a_init.imag(),
                    params.phi_init, params.dphi_init};

    auto stepper = ode::make_controlled(params.abs_tol, params.rel_tol,
                                        ode::runge_kutta_dopri5<state_type>());
    if (params.t_settle > 0.0)
        ode::integrate_adaptive(stepper, sys, y, 0.0, params.t_settle, dt0);

    Trajectory traj;
    traj.integrator_order = 5;
    traj.seed = 0;
    const std::size_t N = params.n_samples;
    traj.dt = params.t_measure / double(N);
    traj.t.reserve(N);
    traj.alpha.reserve(N);
    traj.phi.reserve(N);
    traj.dphi_dt.reserve(N);

    const auto observer = [&](const state_type& s, double t) {
        if (traj.t.size() >= N) return; // drop the closing endpoint sample
        traj.t.push_back(t);
        traj.alpha.emplace_back(s[0], s[1]);
        traj.phi.push_back(s[2]);
        traj.dphi_dt.push_back(s[3]);
    };
    ode::integrate_const(stepper, sys, y, params.t_settle,
                         params.t_settle + params.t_measure, traj.dt, observer);
    if (traj.t.size() != N)
        throw solver_error("integrate_cavity: sample grid incomplete");
    return traj;
}

cplx demodulate(const Trajectory& traj, double Omega) {
    cplx acc(0.0, 0.0);
    for (std::size_t j = 0; j < traj.alpha.size(); ++j)
        acc += traj.alpha[j] * std::polar(1.0, -Omega * traj.t[j]);
    return acc / double(traj.alpha.size());
}

TdReflection probe_response_td(const TdParams& base,
                               const std::vector<double>& probe_omega,
                               double S_probe, double grid_df, double n_hint) {
    if (grid_df <= 0.0)
        throw validation_error("probe_response_td: grid_df must be positive");
    if (S_probe <= 0.0)
        throw validation_error("probe_response_td: S_probe must be positive");

    const auto check_on_grid = [&](double offset, const char* what) {
        const double idx = offset / grid_df;
        if (std::abs(idx - std::round(idx)) > 1e-6)
            throw validation_error(std::string("probe_response_td: ") + what +
                                   " offset is not on the demodulation grid");
    };
    for (const Tone& t : base.tones)
        check_on_grid(t.omega - base.omega_ref, "tone");

    TdParams params = base;
    const double period = two_pi / grid_df;
    const double m = std::max(1.0, std::round(base.t_measure / period));
    params.t_measure = m * period;
    if (params.coupled && params.subtract_static &&
        (params.static_n_ref < 0.0 || params.static_n2_ref < 0.0)) {
        double n_ref = 0.0, n2_ref = 0.0;
        static_reference(params, n_ref, n2_ref);
        params.static_n_ref = n_ref;
        params.static_n2_ref = n2_ref;
    }

    TdReflection out;
    out.omega = probe_omega;
    out.s11.resize(probe_omega.size());
    for (std::size_t i = 0; i < probe_omega.size(); ++i) {
        const double Omega_pr = probe_omega[i] - base.omega_ref;
        check_on_grid(Omega_pr, "probe");

        TdParams run = params;
        Tone probe;
        probe.omega = probe_omega[i];
        probe.S = S_probe;
        probe.probe = true;
        run.tones.push_back(probe);
        run.a_init = td_fixed_point(run, n_hint);
        const Trajectory traj = integrate_cavity(run);
        const cplx gamma = demodulate(traj, Omega_pr);
        out.s11[i] = 1.0 + cplx(0.0, std::sqrt(run.kappa_e)) * gamma / S_probe;
    }
    return out;
}

} // namespace ppk
