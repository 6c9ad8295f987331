#include "ppk/kerr_steady_state.hpp"

#include "ppk/param_model.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ppk {

namespace {

// p(n) = K^2 n^3 - 2 K Delta n^2 + (Delta^2 + kappa^2/4) n - kappa_e S^2.
double cubic_value(double n, double K, double Delta, double kappa,
                   double drive_term) {
    double c2 = Delta * Delta + 0.25 * kappa * kappa;
    return ((K * K * n - 2.0 * K * Delta) * n + c2) * n - drive_term;
}

double cubic_deriv(double n, double K, double Delta, double kappa) {
    double c2 = Delta * Delta + 0.25 * kappa * kappa;
    return 3.0 * K * K * n * n - 4.0 * K * Delta * n + c2;
}

double cubic_residual_scale(double n, double K, double Delta, double kappa,
                            double drive_term) {
    double c2 = Delta * Delta + 0.25 * kappa * kappa;
    return std::max({std::abs(K * K * n * n * n), std::abs(2.0 * K * Delta * n * n),
                     std::abs(c2 * n), std::abs(drive_term)});
}

} // namespace

std::vector<KerrSteadyState> steady_states(const DriveConfig& drive,
                                           const FluxPoint& flux,
                                           double kappa, double kappa_e) {
    if (drive.S_d < 0.0)
        throw validation_error("steady_states: S_d must be non-negative");
    if (!(kappa > 0.0) || !(kappa_e > 0.0) || kappa_e > kappa)
        throw validation_error("steady_states: need 0 < kappa_e <= kappa");

    const double K = flux.K;
    const double Delta = drive.omega_d - flux.omega0;
    const double drive_term = kappa_e * drive.S_d * drive.S_d;
    const double lorentz = Delta * Delta + 0.25 * kappa * kappa;

    std::vector<double> roots;
    // Treat the Kerr term as absent when it cannot move the linear root by
    // one part in 1e-12; avoids a degenerate companion matrix.
    double n_lin = drive_term / lorentz;
    bool kerr_negligible =
        std::abs(K) * n_lin * (std::abs(2.0 * Delta) + std::abs(K) * n_lin) < 1e-12 * lorentz;
    if (K == 0.0 || kerr_negligible) {
        roots.push_back(n_lin);
    } else {
        // Companion matrix of the monic cubic n^3 + a n^2 + b n + c.
        double a = -2.0 * Delta / K;
        double b = lorentz / (K * K);
        double c = -drive_term / (K * K);
        Eigen::Matrix3d comp = Eigen::Matrix3d::Zero();
        comp(1, 0) = 1.0;
        comp(2, 1) = 1.0;
        comp(0, 2) = -c;
        comp(1, 2) = -b;
        comp(2, 2) = -a;
        Eigen::EigenSolver<Eigen::Matrix3d> es(comp);
        if (es.info() != Eigen::Success)
            throw solver_error("steady_states: companion eigenvalue solve failed");
        for (int i = 0; i < 3; ++i) {
            std::complex<double> z = es.eigenvalues()[i];
            double scale = std::max(1.0, std::abs(z));
            if (std::abs(z.imag()) > 1e-7 * scale)
                continue;
            double n = z.real();
            // Newton polish against the original (unscaled) cubic.
            for (int it = 0; it < 50; ++it) {
                double f = cubic_value(n, K, Delta, kappa, drive_term);
                double d = cubic_deriv(n, K, Delta, kappa);
                if (d == 0.0)
                    break;
                double step = f / d;
                n -= step;
                if (std::abs(step) < 1e-15 * std::max(1.0, std::abs(n)))
                    break;
            }
            if (n >= -1e-12 * std::max(1.0, std::abs(n)))
                roots.push_back(std::max(n, 0.0));
        }
        std::sort(roots.begin(), roots.end());
        // De-duplicate near-degenerate fold roots.
        roots.erase(std::unique(roots.begin(), roots.end(),
                                [](double x, double y) {
                                    return std::abs(x - y) < 1e-9 * std::max(1.0, std::abs(y));
                                }),
                    roots.end());
    }

    if (roots.empty())
        throw solver_error("steady_states: no non-negative real root found");

    for (double n : roots) {
        double res = std::abs(cubic_value(n, K, Delta, kappa, drive_term));
        double scale = cubic_residual_scale(n, K, Delta, kappa, drive_term);
        if (scale > 0.0 && res > 1e-9 * scale) {
            std::ostringstream msg;
            msg << "steady_states: root residual " << res / scale << " above 1e-9";
            throw solver_error(msg.str());
        }
    }

    std::vector<KerrSteadyState> out;
    for (std::size_t i = 0; i < roots.size(); ++i) {
        Branch b;
        if (roots.size() == 3) {
            b = i == 0 ? Branch::low : (i == 1 ? Branch::middle_unstable : Branch::high);
        } else if (roots.size() == 2) {
            // Fold point: the degenerate pair collapsed; label by position
            // relative to the cubic inflection.
            double n_inf = K != 0.0 ? 2.0 * Delta / (3.0 * K) : 0.0;
            b = roots[i] > n_inf ? Branch::high : Branch::low;
        } else {
            double n_inf = K != 0.0 ? 2.0 * Delta / (3.0 * K) : 0.0;
            b = (K != 0.0 && roots[i] > n_inf && n_inf > 0.0) ? Branch::high : Branch::low;
        }
        KerrSteadyState s;
        s.n_d = roots[i];
        s.Delta_d = Delta;
        s.branch = b;
        s.phi_d = std::atan2(-0.5 * kappa, Delta - K * roots[i]);
        s.alpha_d = std::sqrt(roots[i]) * std::exp(cplx(0.0, -s.phi_d));
        out.push_back(s);
    }
    return out;
}

KerrSteadyState select_branch(const std::vector<KerrSteadyState>& roots,
                              std::optional<double> history_nd,
                              SweepDirection direction) {
    if (roots.empty())
        throw validation_error("select_branch: empty root list");
    std::vector<KerrSteadyState> stable;
    for (const auto& r : roots)
        if (r.branch != Branch::middle_unstable)
            stable.push_back(r);
    if (stable.empty())
        throw solver_error("select_branch: no stable root");
    if (history_nd) {
        auto best = std::min_element(stable.begin(), stable.end(),
                                     [&](const KerrSteadyState& a, const KerrSteadyState& b) {
                                         return std::abs(a.n_d - *history_nd) <
                                                std::abs(b.n_d - *history_nd);
                                     });
        return *best;
    }
    if (direction == SweepDirection::up)
        return stable.front();
    return stable.back();
}

double LinewidthModel::kappa_of(double n_d) const {
    return kappa_e + kappa_i_residual + tls_linewidth(n_d, kappa_tls0, tls);
}

std::vector<SweepPoint> sweep_flux(const DriveConfig& drive,
                                   const std::vector<double>& phi_b_grid,
                                   SweepDirection direction,
                                   const CircuitParams& circuit,
                                   const LinewidthModel& lw) {
    if (phi_b_grid.empty())
        throw validation_error("sweep_flux: empty flux grid");
    for (std::size_t i = 1; i < phi_b_grid.size(); ++i) {
        bool ok = direction == SweepDirection::up ? phi_b_grid[i] > phi_b_grid[i - 1]
                                                  : phi_b_grid[i] < phi_b_grid[i - 1];
        if (!ok)
            throw validation_error("sweep_flux: grid must be monotone in the sweep direction");
    }

    std::vector<SweepPoint> out;
    std::optional<double> history;
    for (double phi_b : phi_b_grid) {
        SweepPoint pt;
        try {
            pt.flux = flux_point(phi_b, circuit);
            double kappa = lw.kappa_of(history.value_or(0.0));
            KerrSteadyState st;
            bool converged = false;
            for (int it = 0; it < 200; ++it) {
                auto roots = steady_states(drive, pt.flux, kappa, lw.kappa_e);
                st = select_branch(roots, history, direction);
                double kappa_new = lw.kappa_of(st.n_d);
                double kappa_next = 0.5 * kappa + 0.5 * kappa_new; // damping 0.5
                if (std::abs(kappa_next - kappa) < 1e-6 * kappa) {
                    kappa = kappa_next;
                    converged = true;
                    break;
                }
                kappa = kappa_next;
            }
            pt.state = st;
            pt.kappa_eff = kappa;
            pt.converged = converged;
            if (!converged)
                pt.failure = "kappa fixed point did not converge";
            history = st.n_d;
        } catch (const std::exception& e) {
            pt.failure = e.what();
            pt.converged = false;
            history.reset(); // restart continuation after a failed point
        }
        out.push_back(std::move(pt));
    }
    return out;
}

DriveCalibration drive_for_target_nd(double target_nd, const FluxPoint& flux,
                                     double kappa, double kappa_e,
                                     double Delta_d, Branch requested) {
    if (!(target_nd > 0.0))
        throw validation_error("drive_for_target_nd: target_nd must be positive");
    double det = flux.K * target_nd - Delta_d;
    double s2 = target_nd * (det * det + 0.25 * kappa * kappa) / kappa_e;
    if (!(s2 >= 0.0))
        throw validation_error("drive_for_target_nd: infeasible target");
    DriveCalibration cal;
    cal.drive.omega_d = flux.omega0 + Delta_d;
    cal.drive.S_d = std::sqrt(s2);
    auto roots = steady_states(cal.drive, flux, kappa, kappa_e);
    auto best = std::min_element(roots.begin(), roots.end(),
                                 [&](const KerrSteadyState& a, const KerrSteadyState& b) {
                                     return std::abs(a.n_d - target_nd) <
                                            std::abs(b.n_d - target_nd);
                                 });
    cal.state = *best;
    cal.on_requested_branch = best->branch == requested;
    return cal;
}

} // namespace ppk
