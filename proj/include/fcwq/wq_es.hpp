#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fcwq/optimize.hpp"

namespace fcwq {

// Shortfall-weighting parameters: intercept plus the Beta shape pair that
// generates the per-level weights.
struct WqParams {
    double w0 = 0.0;
    double a = 1.0;
    double b = 1.0;
};

struct WqOptions {
    std::uint64_t seed = 0;
    int n_random = 10;
    const WqParams* warm = nullptr;
    OptimizeOptions optimizer{1e-6, 2000};
};

// Normalized Beta-density weights at the interior points j/(m+1), j=1..m.
// Unit sum, all nonnegative; a=b=1 gives the uniform weights.
std::vector<double> beta_weights(double a, double b, int m);

// w0 plus the weighted combined-quantile row.
double es_from_weights(std::span<const double> row, double w0, std::span<const double> weights);

double simple_average_es(std::span<const double> row);

// Mean joint (VaR, ES) score of the weighted shortfall path against returns;
// the VaR column is the last (target-level) combined column. +inf when any
// weighted shortfall fails to be strictly negative.
double wq_objective(const WqParams& p, const std::vector<std::span<const double>>& combined_cols,
                    std::span<const double> returns, double alpha);

// Minimizes wq_objective over (w0, log a, log b) with a smooth multi-start
// search centered at (0, 1, 1).
WqParams estimate_wq_params(const std::vector<std::span<const double>>& combined_cols,
                            std::span<const double> returns, double alpha,
                            const WqOptions& opt = {});

}  // namespace fcwq
