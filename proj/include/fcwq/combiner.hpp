#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "fcwq/optimize.hpp"

namespace fcwq {

// Equally spaced quantile levels ending at the target level.
struct QuantileGrid {
    std::vector<double> levels;
    double eta = 0.0;
    int m() const { return static_cast<int>(levels.size()); }
    double alpha() const { return levels.back(); }
};

QuantileGrid make_grid(double alpha, double alpha1, int m);

// Per-level combination coefficients; c[0] is the intercept, c[1..n_mod]
// multiply the model quantiles in universe order.
struct CombinationWeights {
    std::vector<double> c;
};

class CombinerConvergenceError : public std::runtime_error {
public:
    CombinerConvergenceError(const std::string& what, CombinationWeights best)
        : std::runtime_error(what), best(std::move(best)) {}
    CombinationWeights best;
};

struct CombinerOptions {
    std::uint64_t seed = 0;
    int n_random = 20;
    const CombinationWeights* warm = nullptr;
    OptimizeOptions optimizer{1e-7, 5000};
};

// Mean check loss of the affine combination against realized returns.
double combination_loss(const std::vector<double>& c,
                        const std::vector<std::span<const double>>& model_paths,
                        std::span<const double> returns, double level);

// Coefficients minimizing the mean check loss over the window, unconstrained
// with intercept. Starts at equal weights plus random perturbations plus an
// optional warm start from the previous origin.
CombinationWeights estimate_combination_weights(
    const std::vector<std::span<const double>>& model_paths, std::span<const double> returns,
    double level, const CombinerOptions& opt = {});

double combine(std::span<const double> row, const CombinationWeights& w);

// Ascending rearrangement across grid levels; preserves the multiset of
// values and never increases aggregate check loss over the grid.
std::vector<double> monotonize(std::vector<double> row);

}  // namespace fcwq
