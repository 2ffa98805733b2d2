#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "fcwq/optimize.hpp"

namespace fcwq {

// Conditional autoregressive expectile model with asymmetric slopes,
//   mu_t = b0 + b1 mu_{t-1} + (b2 I(r_{t-1} >= 0) + b3 I(r_{t-1} < 0)) |r_{t-1}|,
// estimated by asymmetric least squares at a trial expectile level tau. The
// expectile level is tuned on a grid in (0, level] so the in-sample violation
// rate of the mu path matches the target quantile level.
struct CareFit {
    std::array<double, 4> betas{};
    double tau_star = 0.0;
    std::vector<double> mu_path;  // in-sample expectiles, one per observation
    double mu_forecast = 0.0;
    double var_forecast = 0.0;  // equals mu_forecast
    double es_forecast = 0.0;
    double vrate = 0.0;      // in-sample violation rate at tau_star
    double objective = 0.0;  // mean asymmetric-least-squares loss at tau_star
};

struct CareOptions {
    std::uint64_t seed = 0;
    int grid_size = 100;
    int n_candidates = 10000;
    int n_refine = 10;
    const CareFit* warm = nullptr;
    OptimizeOptions optimizer{1e-6, 400};
};

// Sample expectile at level tau, computed by the weighted-mean fixed point.
double expectile(std::span<const double> x, double tau);

// Expectile path given parameters; mu_1 is the sample expectile of the first
// min(100, N) observations at tau. Returns N+1 values, the last being the
// one-step forecast.
std::vector<double> care_path(const std::array<double, 4>& betas,
                              std::span<const double> window, double tau);

// Mean asymmetric-least-squares loss |tau - I(r < mu)| (r - mu)^2 along the
// in-sample path.
double care_objective(const std::array<double, 4>& betas, std::span<const double> window,
                      double tau);

// Index of the violation rate closest to level; ties resolve to the smaller
// index. Entries with zero violations cannot support the tail-mean mapping
// and are skipped; throws std::runtime_error when every entry is zero.
std::size_t select_tau(std::span<const double> vrates, double level);

// Grid search over tau with a shared candidate scan: the expectile recursion
// does not depend on tau, so one path pass per candidate yields the loss at
// every grid point from two accumulators. Per grid point the best candidates
// are refined on the exact objective, warm-started along the grid. The ES
// forecast maps the in-sample tail-mean ratio through the forecast expectile.
CareFit fit_care_as(std::span<const double> window, double level,
                    const CareOptions& opt = {});

}  // namespace fcwq
