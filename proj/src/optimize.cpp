#include "ppk/optimize.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>

namespace ppk {

namespace {

Eigen::MatrixXd numeric_jacobian(const ResidualFn& residual,
                                 const std::vector<double>& p,
                                 const std::vector<double>& scales,
                                 int n_residuals) {
    const int np = static_cast<int>(p.size());
    Eigen::MatrixXd J(n_residuals, np);
    std::vector<double> pp = p;
    for (int j = 0; j < np; ++j) {
        const double scale = scales.empty() ? 1.0 : scales[j];
        const double h = std::max(1e-7 * std::abs(p[j]), 1e-9 * std::abs(scale));
        pp[j] = p[j] + h;
        const std::vector<double> rp = residual(pp);
        pp[j] = p[j] - h;
        const std::vector<double> rm = residual(pp);
        pp[j] = p[j];
        for (int i = 0; i < n_residuals; ++i)
            J(i, j) = (rp[i] - rm[i]) / (2.0 * h);
    }
    return J;
}

double cost_of(const std::vector<double>& r) {
    double c = 0.0;
    for (double v : r) c += v * v;
    return c;
}

} // namespace

LmResult levenberg_marquardt(const ResidualFn& residual,
                             std::vector<double> p0,
                             const LmOptions& options,
                             const JacobianFn* jac) {
    LmResult out;
    out.p = p0;
    std::vector<double> r = residual(p0);
    const int nr = static_cast<int>(r.size());
    const int np = static_cast<int>(p0.size());
    out.n_residuals = nr;
    out.cost = cost_of(r);
    if (nr == 0 || np == 0) return out;

    double lambda = options.lambda0;
    Eigen::MatrixXd J;
    bool jacobian_fresh = false;

    auto eval_jacobian = [&](const std::vector<double>& p) {
        if (jac != nullptr) {
            const auto rows = (*jac)(p);
            J.resize(nr, np);
            for (int i = 0; i < nr; ++i)
                for (int j = 0; j < np; ++j) J(i, j) = rows[i][j];
        } else {
            J = numeric_jacobian(residual, p, options.scales, nr);
        }
        jacobian_fresh = true;
    };

    eval_jacobian(out.p);
    for (int iter = 0; iter < options.max_iterations; ++iter) {
        out.iterations = iter + 1;
        if (!jacobian_fresh) eval_jacobian(out.p);

        Eigen::VectorXd rv(nr);
        for (int i = 0; i < nr; ++i) rv(i) = r[i];
        const Eigen::MatrixXd JtJ = J.transpose() * J;
        const Eigen::VectorXd g = J.transpose() * rv;

        if (g.lpNorm<Eigen::Infinity>() < 1e-15 * std::max(1.0, out.cost)) {
            out.converged = true;
            break;
        }

        bool stepped = false;
        while (lambda < 1e14) {
            Eigen::MatrixXd A = JtJ;
            for (int j = 0; j < np; ++j)
                A(j, j) += lambda * std::max(JtJ(j, j), 1e-30);
            const Eigen::VectorXd step = A.ldlt().solve(-g);
            if (!step.allFinite()) {
                lambda *= 10.0;
                continue;
            }
            std::vector<double> pt(out.p);
            for (int j = 0; j < np; ++j) pt[j] += step(j);
            const std::vector<double> rt = residual(pt);
            const double ct = cost_of(rt);
            if (std::isfinite(ct) && ct < out.cost) {
                const double rel_step = step.norm() /
                    std::max(1e-300, Eigen::Map<Eigen::VectorXd>(out.p.data(), np).norm());
                const double rel_drop = (out.cost - ct) / std::max(out.cost, 1e-300);
                out.p = pt;
                r = rt;
                out.cost = ct;
                lambda = std::max(lambda * 0.3, 1e-12);
                jacobian_fresh = false;
                stepped = true;
                if (rel_step < options.xtol || rel_drop < options.ftol)
                    out.converged = true;
                break;
            }
            lambda *= 10.0;
        }
        if (!stepped) {
            // no downhill step available at any damping: treat as converged
            // if the gradient is already tiny, otherwise report failure
            out.converged = g.lpNorm<Eigen::Infinity>() <
                            1e-8 * std::max(1.0, std::sqrt(out.cost));
            break;
        }
        if (out.converged) break;
    }

    // covariance from the linearization at the optimum
    eval_jacobian(out.p);
    const Eigen::MatrixXd JtJ = J.transpose() * J;
    out.standard_errors.assign(np, 0.0);
    const int dof = std::max(1, nr - np);
    const double sigma2 = out.cost / dof;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(JtJ);
    if (lu.isInvertible()) {
        const Eigen::MatrixXd cov = sigma2 * lu.inverse();
        for (int j = 0; j < np; ++j)
            out.standard_errors[j] = std::sqrt(std::max(0.0, cov(j, j)));
    }
    return out;
}

LorentzianPole fit_complex_lorentzian(const std::vector<double>& W,
                                      const std::vector<std::complex<double>>& chi,
                                      double center0, double width0) {
    // parameters: {Re c, Im c, center, width}
    const auto model_residual = [&](const std::vector<double>& p) {
        std::vector<double> r;
        r.reserve(2 * W.size());
        const std::complex<double> c(p[0], p[1]);
        for (std::size_t i = 0; i < W.size(); ++i) {
            const std::complex<double> m =
                c / std::complex<double>(0.5 * p[3], W[i] - p[2]);
            r.push_back(m.real() - chi[i].real());
            r.push_back(m.imag() - chi[i].imag());
        }
        return r;
    };

    // amplitude seed from the sample nearest the peak guess
    std::size_t k = 0;
    for (std::size_t i = 1; i < W.size(); ++i)
        if (std::abs(W[i] - center0) < std::abs(W[k] - center0)) k = i;
    const std::complex<double> c0 = chi[k] * (0.5 * width0);

    LmOptions opt;
    opt.scales = {std::abs(c0) + 1e-30, std::abs(c0) + 1e-30,
                  std::abs(center0) + width0, width0};
    const LmResult fit = levenberg_marquardt(
        model_residual, {c0.real(), c0.imag(), center0, width0}, opt);

    LorentzianPole pole;
    pole.center = fit.p[2];
    pole.width = std::abs(fit.p[3]);
    pole.converged = fit.converged;
    return pole;
}

} // namespace ppk
