#include "ppk/fitting.hpp"

#include "ppk/linear_response.hpp"
#include "ppk/optimize.hpp"
#include "ppk/photon_pressure.hpp"
#include "ppk/noise_spectra.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <numeric>

namespace ppk {

namespace {

// 3x3 linear solve, partial pivoting
std::array<double, 3> solve3(std::array<std::array<double, 4>, 3> m) {
    for (int c = 0; c < 3; ++c) {
        int p = c;
        for (int r = c + 1; r < 3; ++r)
            if (std::abs(m[r][c]) > std::abs(m[p][c])) p = r;
        std::swap(m[c], m[p]);
        if (std::abs(m[c][c]) < 1e-300)
            throw solver_error("fit_background: singular normal equations");
        for (int r = 0; r < 3; ++r) {
            if (r == c) continue;
            const double f = m[r][c] / m[c][c];
            for (int k = c; k < 4; ++k) m[r][k] -= f * m[c][k];
        }
    }
    return {m[0][3] / m[0][0], m[1][3] / m[1][1], m[2][3] / m[2][2]};
}

cplx background_factor(const BackgroundModel& bg, double omega) {
    const double x = omega - bg.omega_ref;
    const double amp = bg.a0 + bg.a1 * x + bg.a2 * x * x;
    return amp * std::polar(1.0, bg.phi0 + bg.phi1 * x);
}

} // namespace

BackgroundModel fit_background(const std::vector<double>& omega,
                               const std::vector<cplx>& s11,
                               const std::vector<bool>& resonance_mask) {
    const std::size_t n = omega.size();
    if (s11.size() != n || resonance_mask.size() != n)
        throw validation_error("fit_background: input sizes differ");
    std::size_t first = n, last = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (resonance_mask[i]) {
            first = std::min(first, i);
            last = i;
        }
    }
    if (first == n)
        throw validation_error("fit_background: empty resonance mask");
    std::size_t left = 0, right = 0;
    for (std::size_t i = 0; i < first; ++i) left += !resonance_mask[i];
    for (std::size_t i = last + 1; i < n; ++i) right += !resonance_mask[i];
    if (left < 6 || right < 6)
        throw validation_error(
            "fit_background: need at least 6 background samples on each side");

    BackgroundModel bg;
    bg.omega_ref = std::accumulate(omega.begin(), omega.end(), 0.0) / double(n);

    // quadratic amplitude on background samples
    std::array<std::array<double, 4>, 3> na{};
    for (std::size_t i = 0; i < n; ++i) {
        if (resonance_mask[i]) continue;
        const double x = omega[i] - bg.omega_ref;
        const double y = std::abs(s11[i]);
        const double b[3] = {1.0, x, x * x};
        for (int r = 0; r < 3; ++r) {
            for (int c = 0; c < 3; ++c) na[r][c] += b[r] * b[c];
            na[r][3] += b[r] * y;
        }
    }
    const auto amp = solve3(na);
    bg.a0 = amp[0];
    bg.a1 = amp[1];
    bg.a2 = amp[2];

    // linear phase on background samples, unwrapped sequentially
    double sx = 0, sxx = 0, sy = 0, sxy = 0, cnt = 0;
    double prev = 0.0;
    bool have_prev = false;
    for (std::size_t i = 0; i < n; ++i) {
        if (resonance_mask[i]) continue;
        double ph = std::arg(s11[i]);
        if (have_prev) {
            while (ph - prev > std::numbers::pi) ph -= 2.0 * std::numbers::pi;
            while (ph - prev < -std::numbers::pi) ph += 2.0 * std::numbers::pi;
        }
        prev = ph;
        have_prev = true;
        const double x = omega[i] - bg.omega_ref;
        sx += x;
        sxx += x * x;
        sy += ph;
        sxy += x * ph;
        cnt += 1.0;
    }
    const double det = cnt * sxx - sx * sx;
    if (std::abs(det) < 1e-300)
        throw solver_error("fit_background: degenerate phase fit");
    bg.phi1 = (cnt * sxy - sx * sy) / det;
    bg.phi0 = (sy - bg.phi1 * sx) / cnt;

    // rotation of the resonance circle about the off-resonance point 1
    bg.theta = 0.0;
    std::array<std::array<double, 4>, 3> nc{};
    for (std::size_t i = 0; i < n; ++i) {
        if (!resonance_mask[i]) continue;
        const cplx z = s11[i] / background_factor(bg, omega[i]);
        const double b[3] = {2.0 * z.real(), 2.0 * z.imag(), 1.0};
        const double y = std::norm(z);
        for (int r = 0; r < 3; ++r) {
            for (int c = 0; c < 3; ++c) nc[r][c] += b[r] * b[c];
            nc[r][3] += b[r] * y;
        }
    }
    const auto circ = solve3(nc);
    bg.theta = std::arg(cplx(1.0 - circ[0], -circ[1]));
    return bg;
}

std::vector<cplx> apply_background(const BackgroundModel& bg,
                                   const std::vector<double>& omega,
                                   const std::vector<cplx>& s11_ideal) {
    std::vector<cplx> out(omega.size());
    const cplx rot = std::polar(1.0, bg.theta);
    for (std::size_t i = 0; i < omega.size(); ++i)
        out[i] = background_factor(bg, omega[i]) *
                 (1.0 + (s11_ideal[i] - 1.0) * rot);
    return out;
}

std::vector<cplx> correct_background(const BackgroundModel& bg,
                                     const std::vector<double>& omega,
                                     const std::vector<cplx>& s11_measured) {
    std::vector<cplx> out(omega.size());
    const cplx derot = std::polar(1.0, -bg.theta);
    for (std::size_t i = 0; i < omega.size(); ++i)
        out[i] = 1.0 + (s11_measured[i] / background_factor(bg, omega[i]) - 1.0) *
                           derot;
    return out;
}

FitResult fit_reflection_kerr(const std::vector<double>& omega,
                              const std::vector<cplx>& s11,
                              const KerrReflectionFixed& fixed) {
    if (omega.size() != s11.size())
        throw validation_error("fit_reflection_kerr: input sizes differ");
    if (fixed.K == 0.0)
        throw validation_error("fit_reflection_kerr: K must be nonzero");
    const double Delta_d = fixed.omega_d - fixed.omega0;

    const auto residual = [&](const std::vector<double>& p) {
        const double kappa = std::exp(p[0]);
        const double n_d = std::exp(p[1]);
        KerrSteadyState st;
        st.n_d = n_d;
        st.Delta_d = Delta_d;
        const auto resp = KerrResponse::drive_frame(st, kappa, fixed.K);
        std::vector<double> r;
        r.reserve(2 * omega.size());
        for (std::size_t i = 0; i < omega.size(); ++i) {
            const cplx model =
                1.0 - fixed.kappa_e * resp.chi_g(omega[i] - fixed.omega_d);
            r.push_back(model.real() - s11[i].real());
            r.push_back(model.imag() - s11[i].imag());
        }
        return r;
    };

    double min_abs = 1e300;
    for (const cplx& v : s11) min_abs = std::min(min_abs, std::abs(v));
    const double depth = std::clamp(1.0 - min_abs, 0.05, 2.0);
    const double kappa0 = 2.0 * fixed.kappa_e / depth;

    LmResult best;
    best.cost = 1e300;
    for (const double u : {0.003, 0.01, 0.03, 0.1, 0.3}) {
        const double n0 = u * std::abs(Delta_d / fixed.K);
        if (n0 <= 0.0) continue;
        const LmResult fit = levenberg_marquardt(
            residual, {std::log(kappa0), std::log(n0)});
        if (fit.cost < best.cost) best = fit;
    }
    if (best.cost >= 1e300)
        throw solver_error("fit_reflection_kerr: no start point converged");

    FitResult out;
    out.parameters["kappa"] = std::exp(best.p[0]);
    out.parameters["n_d"] = std::exp(best.p[1]);
    out.standard_errors["kappa"] = out.parameters["kappa"] * best.standard_errors[0];
    out.standard_errors["n_d"] = out.parameters["n_d"] * best.standard_errors[1];
    out.residual_norm = std::sqrt(best.cost);
    out.converged = best.converged;
    out.n_iterations = best.iterations;
    return out;
}

FitResult fit_noise_spectrum(const std::vector<double>& Omega,
                             const std::vector<double>& psd,
                             const PhotonPressureResponse& resp,
                             const NoiseBaths& baths_fixed, double Gamma_e,
                             double Gamma_i) {
    if (Omega.size() != psd.size() || Omega.size() < 8)
        throw validation_error("fit_noise_spectrum: bad input sizes");

    // multiplicative noise model, scatter taken from the spectrum edges
    std::vector<double> scatter;
    const std::size_t edge = std::max<std::size_t>(4, Omega.size() * 15 / 100);
    for (std::size_t i = 1; i < Omega.size(); ++i) {
        if (i >= edge && i + edge < Omega.size()) continue;
        if (psd[i] > 0.0 && psd[i - 1] > 0.0)
            scatter.push_back(std::abs(psd[i] - psd[i - 1]) /
                              (std::numbers::sqrt2 * psd[i]));
    }
    std::sort(scatter.begin(), scatter.end());
    double sigma_rel = scatter.empty() ? 0.0 : 1.4826 * scatter[scatter.size() / 2];
    sigma_rel = std::max(sigma_rel, 1e-6);

    const auto residual = [&](const std::vector<double>& p) {
        NoiseBaths b = baths_fixed;
        b.n_e_RF = std::exp(p[0]);
        b.n_i_RF = b.n_e_RF;
        const std::vector<double> model =
            pp_output_psd(Omega, resp, b, Gamma_e, Gamma_i);
        std::vector<double> r(Omega.size());
        for (std::size_t i = 0; i < Omega.size(); ++i)
            r[i] = (model[i] - psd[i]) / (sigma_rel * std::max(psd[i], 1e-12));
        return r;
    };

    LmResult best;
    best.cost = 1e300;
    for (const double x0 : {1.0, 5.0, 15.0, 50.0}) {
        const LmResult fit = levenberg_marquardt(residual, {std::log(x0)});
        if (fit.cost < best.cost) best = fit;
    }

    FitResult out;
    out.parameters["n_th_RF"] = std::exp(best.p[0]);
    out.standard_errors["n_th_RF"] =
        out.parameters["n_th_RF"] * best.standard_errors[0];
    out.residual_norm = std::sqrt(best.cost);
    out.converged = best.converged;
    out.n_iterations = best.iterations;
    return out;
}

FitResult fit_effective_model(const std::vector<double>& Omega,
                              const std::vector<cplx>& s11,
                              double Omega_s_pump_frame) {
    const std::size_t n = Omega.size();
    if (s11.size() != n || n < 16)
        throw validation_error("fit_effective_model: bad input sizes");
    const double span = Omega.back() - Omega.front();

    // broad-dip seeds
    std::size_t i_min = 0;
    for (std::size_t i = 1; i < n; ++i)
        if (std::abs(s11[i]) < std::abs(s11[i_min])) i_min = i;
    const double edge_level =
        0.5 * (std::abs(s11.front()) + std::abs(s11.back()));
    const double depth =
        std::clamp(edge_level - std::abs(s11[i_min]), 0.02, 2.0);
    const double half = edge_level - 0.5 * depth;
    std::size_t iL = i_min, iR = i_min;
    while (iL > 0 && std::abs(s11[iL]) < half) --iL;
    while (iR + 1 < n && std::abs(s11[iR]) < half) ++iR;
    const double kappa0 =
        std::clamp(Omega[iR] - Omega[iL], span / 200.0, span);
    const double kappa1_0 = 0.5 * kappa0 * depth / std::max(edge_level, 0.1);

    // narrow interference feature against the broad dip alone
    double best_dev = -1.0;
    std::size_t i_nar = i_min;
    for (std::size_t i = 0; i < n; ++i) {
        const cplx chi_s = 1.0 / cplx(0.5 * kappa0, Omega[i] - Omega_s_pump_frame);
        const double dev =
            std::abs(std::abs(s11[i]) - std::abs(1.0 - kappa1_0 * chi_s));
        if (dev > best_dev) {
            best_dev = dev;
            i_nar = i;
        }
    }
    const double Omega0_init = Omega[i_nar];
    const double Gamma0_init = std::max(span / double(n) * 4.0, kappa0 / 200.0);

    const auto residual = [&](const std::vector<double>& p) {
        const double kappa1 = std::exp(p[0]);
        const double kappa = std::exp(p[1]);
        const double g_eff = std::exp(p[2]);
        const RfMode rf{p[3], std::exp(p[4])};
        const std::vector<cplx> model = reflection_effective(
            Omega, kappa1, kappa, g_eff, rf, Omega_s_pump_frame);
        std::vector<double> r;
        r.reserve(2 * n);
        for (std::size_t i = 0; i < n; ++i) {
            r.push_back(model[i].real() - s11[i].real());
            r.push_back(model[i].imag() - s11[i].imag());
        }
        return r;
    };

    LmResult best;
    best.cost = 1e300;
    for (const double fg : {0.3, 1.0, 3.0}) {
        for (const double fgam : {0.3, 1.0, 3.0}) {
            const double g0 = 0.5 * std::sqrt(kappa0 * Gamma0_init * fgam) * fg * 2.0;
            LmOptions opt;
            opt.scales = {1.0, 1.0, 1.0, std::abs(Omega0_init) + kappa0, 1.0};
            const LmResult fit = levenberg_marquardt(
                residual,
                {std::log(kappa1_0), std::log(kappa0), std::log(g0),
                 Omega0_init, std::log(Gamma0_init * fgam)},
                opt);
            if (fit.cost < best.cost) best = fit;
        }
    }

    FitResult out;
    out.parameters["kappa1"] = std::exp(best.p[0]);
    out.parameters["kappa"] = std::exp(best.p[1]);
    out.parameters["g_eff"] = std::exp(best.p[2]);
    out.parameters["Omega0"] = best.p[3];
    out.parameters["Gamma0"] = std::exp(best.p[4]);
    out.standard_errors["kappa1"] = out.parameters["kappa1"] * best.standard_errors[0];
    out.standard_errors["kappa"] = out.parameters["kappa"] * best.standard_errors[1];
    out.standard_errors["g_eff"] = out.parameters["g_eff"] * best.standard_errors[2];
    out.standard_errors["Omega0"] = best.standard_errors[3];
    out.standard_errors["Gamma0"] = out.parameters["Gamma0"] * best.standard_errors[4];
    out.residual_norm = std::sqrt(best.cost);
    out.converged = best.converged;
    out.n_iterations = best.iterations;
    return out;
}

} // namespace ppk
