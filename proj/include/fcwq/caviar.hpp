#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "fcwq/optimize.hpp"

namespace fcwq {

// Asymmetric-slope quantile recursion:
//   Q_t = b0 + b1 Q_{t-1} + (b2 I(r_{t-1} >= 0) + b3 I(r_{t-1} < 0)) |r_{t-1}|
// Q_1 is the empirical level-quantile of the first 100 observations.
struct CaviarFit {
    std::array<double, 4> betas{};
    std::vector<double> q_path;  // in-sample, one per observation
    double q_forecast = 0.0;     // one step past the window
    double objective = 0.0;      // mean quantile loss attained
};

struct CaviarOptions {
    std::uint64_t seed = 0;
    int n_candidates = 10000;  // uniform draws scored by the objective
    int n_refine = 10;         // best candidates polished by simplex search
    const CaviarFit* warm = nullptr;
    OptimizeOptions optimizer{1e-7, 2000};
};

// Initial quantile: order statistic ceil(n*level) of the first min(100, N)
// observations.
double caviar_q1(std::span<const double> window, double level);

// Recursion replay: returns N in-sample values followed by the one-step
// forecast (length N+1).
std::vector<double> caviar_path(const std::array<double, 4>& betas,
                                std::span<const double> window, double level);

// Mean quantile loss of the recursion's in-sample path.
double caviar_objective(const std::array<double, 4>& betas, std::span<const double> window,
                        double level);

CaviarFit fit_caviar_as(std::span<const double> window, double level,
                        const CaviarOptions& opt = {});

}  // namespace fcwq
