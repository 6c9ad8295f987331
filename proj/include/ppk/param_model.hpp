#pragma once

#include "ppk/types.hpp"

#include <optional>

namespace ppk {

// Screened SQUID flux: solves phi = phi_b - (beta_L/2) sin(pi phi) for the
// total flux, both in units of Phi0. The residual at the returned value is
// below 1e-12. When the screening map is multivalued the solution branch is
// chosen by continuation from continuation_hint (default: the branch
// connected to phi_b = 0).
double total_flux(double phi_b, double beta_L,
                  std::optional<double> continuation_hint = std::nullopt);

// omega0(phi_b) = omega0(0) / sqrt(Lambda + (1-Lambda)/cos(pi phi)).
// Throws std::domain_error when cos(pi phi_total) <= 0.
double cavity_frequency(double phi_b, const CircuitParams& c);

// K(phi_b) = -(e^2 / 2 hbar C_HF) * (L_j / (L_HF - L_j0/2 + L_j))^3 with
// L_j = L_j0 / cos(pi phi). Always negative on the valid domain.
double kerr_constant(double phi_b, const CircuitParams& c);

// Central finite differences of cavity_frequency and kerr_constant in phi_b.
// The step is halved until the estimate changes by less than 0.1%.
// Returns (G0, G_K) in rad/s per Phi0.
struct Responsivities {
    double G0 = 0.0;
    double G_K = 0.0;
};
Responsivities flux_responsivities(double phi_b, const CircuitParams& c,
                                   double delta = 1e-5);

// Bundles the flux-dependent quantities at one bias point.
FluxPoint flux_point(double phi_b, const CircuitParams& c);

// Power-dependent TLS contribution to the cavity linewidth. kappa1 is the
// unsaturated TLS linewidth (the n_d = 0 value). Monotone non-increasing in
// n_d for Delta_tls = 0.
double tls_linewidth(double n_d, double kappa1, const TlsParams& tls);

// Input line conversion: P in dBm, attenuation A in dB, carrier omega in
// rad/s -> photon flux |S_in|^2 in photons/s.
double power_to_photon_flux(double power_dbm, double attenuation_db,
                            double omega);
double photon_flux_to_power(double flux, double attenuation_db, double omega);

// Parameter validation used by constructors of experiment configs.
void validate(const CircuitParams& c);

} // namespace ppk
