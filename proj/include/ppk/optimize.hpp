#pragma once

#include <complex>
#include <functional>
#include <vector>

namespace ppk {

using ResidualFn = std::function<std::vector<double>(const std::vector<double>&)>;
using JacobianFn = std::function<std::vector<std::vector<double>>(const std::vector<double>&)>;

struct LmOptions {
    int max_iterations = 200;
    double xtol = 1e-12;          // relative step threshold
    double ftol = 1e-12;          // relative cost-decrease threshold
    double lambda0 = 1e-3;        // initial damping
    std::vector<double> scales;   // per-parameter magnitudes for FD steps; default 1
};

struct LmResult {
    std::vector<double> p;
    std::vector<double> standard_errors; // from cost/(N-P) * (J^T J)^-1 diagonal
    double cost = 0.0;                   // sum of squared residuals
    int iterations = 0;
    bool converged = false;
    int n_residuals = 0;
};

// Damped Gauss-Newton (Levenberg-Marquardt) on a stacked real residual
// vector. The Jacobian is computed by central differences when jac is null.
LmResult levenberg_marquardt(const ResidualFn& residual,
                             std::vector<double> p0,
                             const LmOptions& options = {},
                             const JacobianFn* jac = nullptr);

// Complex Lorentzian fit chi(W) ~= c / (i (W - Wc) + G/2) on samples.
// Returns (Wc, G) with the complex amplitude discarded.
struct LorentzianPole {
    double center = 0.0;
    double width = 0.0;
    bool converged = false;
};
LorentzianPole fit_complex_lorentzian(const std::vector<double>& W,
                                      const std::vector<std::complex<double>>& chi,
                                      double center0, double width0);

} // namespace ppk
