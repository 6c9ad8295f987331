#include "ppk/param_model.hpp"

#include "ppk/constants.hpp"

#include <cmath>
#include <sstream>

namespace ppk {

namespace {

double screening_residual(double phi, double phi_b, double beta_L) {
    return phi + 0.5 * beta_L * std::sin(std::numbers::pi * phi) - phi_b;
}

double screening_residual_deriv(double phi, double beta_L) {
    return 1.0 + 0.5 * beta_L * std::numbers::pi * std::cos(std::numbers::pi * phi);
}

} // namespace

double total_flux(double phi_b, double beta_L,
                  std::optional<double> continuation_hint) {
    if (beta_L < 0.0)
        throw validation_error("total_flux: beta_L must be non-negative");
    if (beta_L == 0.0)
        return phi_b;

    // Continuation start: the hint if provided, else the branch through 0.
    double phi = continuation_hint.value_or(phi_b / (1.0 + 0.5 * beta_L * std::numbers::pi));

    // Damped fixed-point iteration pulls the estimate near the right branch
    // even when the map is locally expanding.
    const double lam = 1.0 / (1.0 + 0.5 * beta_L * std::numbers::pi);
    for (int i = 0; i < 200; ++i) {
        double next = phi + lam * (phi_b - 0.5 * beta_L * std::sin(std::numbers::pi * phi) - phi);
        if (std::abs(next - phi) < 1e-14 * (1.0 + std::abs(next))) {
            phi = next;
            break;
        }
        phi = next;
    }

    // Newton polish; falls back to bisection around the current estimate if
    // the derivative degenerates (multivalued region edges).
    for (int i = 0; i < 60; ++i) {
        double r = screening_residual(phi, phi_b, beta_L);
        if (std::abs(r) < 1e-13)
            return phi;
        double d = screening_residual_deriv(phi, beta_L);
        if (std::abs(d) < 1e-8)
            break;
        phi -= r / d;
    }
    if (std::abs(screening_residual(phi, phi_b, beta_L)) < 1e-12)
        return phi;

    // Bisection on an expanding bracket centered on the continuation value.
    double half = 0.25;
    for (; half <= 4.0; half *= 2.0) {
        double lo = phi - half, hi = phi + half;
        double rlo = screening_residual(lo, phi_b, beta_L);
        double rhi = screening_residual(hi, phi_b, beta_L);
        if (rlo == 0.0) return lo;
        if (rhi == 0.0) return hi;
        if (rlo * rhi < 0.0) {
            for (int i = 0; i < 200; ++i) {
                double mid = 0.5 * (lo + hi);
                double rm = screening_residual(mid, phi_b, beta_L);
                if (std::abs(rm) < 1e-13 || hi - lo < 1e-15)
                    return mid;
                if (rlo * rm <= 0.0) {
                    hi = mid;
                } else {
                    lo = mid;
                    rlo = rm;
                }
            }
            return 0.5 * (lo + hi);
        }
    }
    std::ostringstream msg;
    msg << "total_flux: no solution near hint for phi_b=" << phi_b
        << " beta_L=" << beta_L;
    throw solver_error(msg.str());
}

double cavity_frequency(double phi_b, const CircuitParams& c) {
    double phi = total_flux(phi_b, c.beta_L);
    double cs = std::cos(std::numbers::pi * phi);
    if (cs <= 0.0)
        throw std::domain_error("cavity_frequency: cos(pi phi_total) <= 0 (arch edge)");
    double bracket = c.Lambda + (1.0 - c.Lambda) / cs;
    return c.omega0_sweetspot / std::sqrt(bracket);
}

double kerr_constant(double phi_b, const CircuitParams& c) {
    double phi = total_flux(phi_b, c.beta_L);
    double cs = std::cos(std::numbers::pi * phi);
    if (cs <= 0.0)
        throw std::domain_error("kerr_constant: cos(pi phi_total) <= 0 (arch edge)");
    double L_j = c.L_j0 / cs;
    double ratio = L_j / (c.L_HF - 0.5 * c.L_j0 + L_j);
    double prefactor = elementary_charge * elementary_charge / (2.0 * hbar * c.C_HF);
    return -prefactor * ratio * ratio * ratio;
}

namespace {

// Central difference with step halving until the estimate moves < 0.1%.
template <typename F>
double converged_central_diff(F&& f, double x, double h0) {
    double prev = (f(x + h0) - f(x - h0)) / (2.0 * h0);
    double h = h0;
    for (int i = 0; i < 12; ++i) {
        h *= 0.5;
        double cur = (f(x + h) - f(x - h)) / (2.0 * h);
        double scale = std::max(std::abs(cur), std::abs(prev));
        if (scale == 0.0 || std::abs(cur - prev) <= 1e-3 * scale)
            return cur;
        prev = cur;
    }
    return prev;
}

} // namespace

Responsivities flux_responsivities(double phi_b, const CircuitParams& c,
                                   double delta) {
    Responsivities r;
    r.G0 = converged_central_diff(
        [&](double x) { return cavity_frequency(x, c); }, phi_b, delta);
    r.G_K = converged_central_diff(
        [&](double x) { return kerr_constant(x, c); }, phi_b, delta);
    return r;
}

FluxPoint flux_point(double phi_b, const CircuitParams& c) {
    FluxPoint p;
    p.phi_b = phi_b;
    p.phi_total = total_flux(phi_b, c.beta_L);
    p.omega0 = cavity_frequency(phi_b, c);
    p.K = kerr_constant(phi_b, c);
    auto resp = flux_responsivities(phi_b, c);
    p.G0 = resp.G0;
    p.G_K = resp.G_K;
    p.g0 = p.G0 * c.Phi_zpf;
    p.g_K = p.G_K * c.Phi_zpf;
    return p;
}

double tls_linewidth(double n_d, double kappa1, const TlsParams& tls) {
    if (n_d < 0.0)
        throw validation_error("tls_linewidth: n_d must be non-negative");
    if (tls.n_cr <= 0.0)
        return kappa1;
    double x = n_d / tls.n_cr;
    double root = std::sqrt(1.0 + x);
    double detune = tls.Gamma2 > 0.0 ? tls.Delta_tls / tls.Gamma2 : 0.0;
    double sat = (x / root) * (1.0 + root) / (detune * detune + (1.0 + root) * (1.0 + root));
    return kappa1 * (1.0 - sat);
}

double power_to_photon_flux(double power_dbm, double attenuation_db,
                            double omega) {
    if (omega <= 0.0)
        throw validation_error("power_to_photon_flux: omega must be positive");
    double watts = std::pow(10.0, (power_dbm - attenuation_db - 30.0) / 10.0);
    return watts / (hbar * omega);
}

double photon_flux_to_power(double flux, double attenuation_db, double omega) {
    if (flux <= 0.0)
        throw validation_error("photon_flux_to_power: flux must be positive");
    if (omega <= 0.0)
        throw validation_error("photon_flux_to_power: omega must be positive");
    double watts = flux * hbar * omega;
    return 10.0 * std::log10(watts) + 30.0 + attenuation_db;
}

void validate(const CircuitParams& c) {
    auto fail = [](const std::string& what) { throw validation_error("CircuitParams: " + what); };
    if (!(c.Lambda > 0.0 && c.Lambda < 1.0)) fail("Lambda must satisfy 0 < Lambda < 1");
    if (c.beta_L < 0.0) fail("beta_L must be non-negative");
    if (!(c.kappa_e_base <= c.kappa_base)) fail("kappa_e_base must not exceed kappa_base");
    if (!(c.kappa_base > 0.0)) fail("kappa_base must be positive");
    if (!(c.kappa_e_base > 0.0)) fail("kappa_e_base must be positive");
    if (!(c.Gamma_e > 0.0) || !(c.Gamma_i >= 0.0)) fail("RF linewidths must be positive");
    if (!(c.Phi_zpf > 0.0)) fail("Phi_zpf must be positive");
    if (!(c.Omega0_RF > 0.0)) fail("Omega0_RF must be positive");
    if (!(c.omega0_sweetspot > 0.0)) fail("omega0_sweetspot must be positive");
}

const char* branch_name(Branch b) {
    switch (b) {
    case Branch::low: return "low";
    case Branch::middle_unstable: return "middle-unstable";
    case Branch::high: return "high";
    }
    return "?";
}

} // namespace ppk
