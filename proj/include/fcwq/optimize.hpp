#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace fcwq {

using Objective = std::function<double(const std::vector<double>&)>;

struct OptimizeOptions {
    double tol = 1e-7;   // nonsmooth: simplex objective spread; smooth: gradient inf-norm
    int max_iter = 5000;
};

struct OptimizeResult {
    std::vector<double> x;
    double value = 0.0;
    bool converged = false;
    long evaluations = 0;
};

// Derivative-free simplex search. Non-finite objective values are treated as
// +infinity, which steers the simplex away from invalid regions.
OptimizeResult nelder_mead(const Objective& f, const std::vector<double>& x0,
                           const OptimizeOptions& opt);

// Quasi-Newton with central finite-difference gradients,
// step h_i = max(1e-6, 1e-8*|x_i|), and backtracking line search that
// rejects non-finite trial values. Converged means the gradient norm fell
// below tol or progress stopped at finite-difference noise level; only
// max_iter exhaustion while still descending reports non-convergence.
// Throws std::runtime_error when the objective is non-finite at the start
// or at both probes of a gradient coordinate.
OptimizeResult bfgs(const Objective& f, const std::vector<double>& x0,
                    const OptimizeOptions& opt);

// Multi-start wrappers. Starts where the objective is non-finite are
// discarded; every start discarded is an error. The best value wins, ties
// broken by the earliest start index, so the reduction is deterministic.
OptimizeResult minimize_nonsmooth(const Objective& f,
                                  const std::vector<std::vector<double>>& starts,
                                  const OptimizeOptions& opt = OptimizeOptions{1e-7, 5000});
OptimizeResult minimize_smooth(const Objective& f,
                               const std::vector<std::vector<double>>& starts,
                               const OptimizeOptions& opt = OptimizeOptions{1e-8, 5000});

// Center plus n_random uniform draws from the box center +- scale,
// deterministic per seed.
std::vector<std::vector<double>> multi_start_grid(const std::vector<double>& center,
                                                  int n_random,
                                                  const std::vector<double>& scale,
                                                  std::uint64_t seed);

}  // namespace fcwq
