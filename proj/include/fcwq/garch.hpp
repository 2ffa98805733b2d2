#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "fcwq/optimize.hpp"
#include "fcwq/types.hpp"

namespace fcwq {

enum class GarchKind { Gjr, Egarch };

// Student-t quasi-maximum-likelihood volatility fit with zero conditional
// mean. GJR variance recursion:
//   s2_t = omega + (alpha1 + gamma * I(r_{t-1} < 0)) * r_{t-1}^2 + beta * s2_{t-1}
// EGARCH log-variance recursion, z standardized:
//   ln s2_t = omega + beta * ln s2_{t-1} + alpha1 * (|z_{t-1}| - E|z|) + gamma * z_{t-1}
// Both start from the window's mean square (zero-mean sample variance).
struct GarchFit {
    GarchKind kind = GarchKind::Gjr;
    double omega = 0.0;
    double alpha1 = 0.0;
    double gamma = 0.0;
    double beta = 0.0;
    double nu = 0.0;
    std::vector<double> sigma_path;  // in-sample conditional sd, one per observation
    double sigma_forecast = 0.0;     // one-step-ahead conditional sd
    double nll = 0.0;                // attained negative log-likelihood
    bool converged = false;
};

struct GarchOptions {
    std::uint64_t seed = 0;
    int n_random = 2;                 // random starts beyond the fixed ones
    const GarchFit* warm = nullptr;   // previous-window solution, extra start
    OptimizeOptions optimizer{1e-8, 5000};
};

// Thrown when the likelihood search exhausts its iteration budget; carries
// the best fit found so callers can decide whether to use it anyway.
struct GarchConvergenceError : std::runtime_error {
    GarchFit best;
    GarchConvergenceError(const std::string& what, GarchFit fit)
        : std::runtime_error(what), best(std::move(fit)) {}
};

GarchFit fit_garch(std::span<const double> window, GarchKind kind,
                   const GarchOptions& opt = {});

// One GJR / EGARCH recursion step; exposed for direct verification.
double gjr_variance_step(double omega, double alpha1, double gamma, double beta,
                         double r_prev, double s2_prev);
double egarch_logvar_step(double omega, double alpha1, double gamma, double beta,
                          double z_prev, double logs2_prev, double e_abs_z);

// Per-level one-step (VaR, ES) = sigma_forecast times the standardized-t
// quantile / tail mean. Levels in (0, 0.5).
std::vector<RiskForecast> parametric_var_es(const GarchFit& fit,
                                            const std::vector<double>& levels);

// In-sample standardized residuals r_t / sigma_t.
std::vector<double> standardized_residuals(const GarchFit& fit,
                                           std::span<const double> window);

}  // namespace fcwq
