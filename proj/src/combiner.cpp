#include "fcwq/combiner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fcwq/rng.hpp"

namespace fcwq {

QuantileGrid make_grid(double alpha, double alpha1, int m) {
    if (m < 2) throw std::invalid_argument("make_grid: need at least two levels");
    if (!(alpha1 > 0.0) || !(alpha1 < alpha) || !(alpha < 0.5))
        throw std::invalid_argument("make_grid: need 0 < alpha1 < alpha < 0.5");
    QuantileGrid grid;
    grid.eta = (alpha - alpha1) / static_cast<double>(m - 1);
    grid.levels.resize(m);
    for (int j = 0; j < m; ++j) grid.levels[j] = alpha1 + grid.eta * static_cast<double>(j);
    grid.levels.back() = alpha;
    return grid;
}

double combination_loss(const std::vector<double>& c,
                        const std::vector<std::span<const double>>& model_paths,
                        std::span<const double> returns, double level) {
    const std::size_t n = returns.size();
    const std::size_t k = model_paths.size();
    double acc = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        double q = c[0];
        for (std::size_t i = 0; i < k; ++i) q += c[i + 1] * model_paths[i][t];
        const double d = returns[t] - q;
        acc += level * d - (d < 0.0 ? d : 0.0);
    }
    if (!std::isfinite(acc)) return std::numeric_limits<double>::infinity();
    return acc / static_cast<double>(n);
}

CombinationWeights estimate_combination_weights(
    const std::vector<std::span<const double>>& model_paths, std::span<const double> returns,
    double level, const CombinerOptions& opt) {
    if (model_paths.empty())
        throw std::invalid_argument("estimate_combination_weights: no model columns");
    if (returns.empty()) throw std::invalid_argument("estimate_combination_weights: empty window");
    for (const auto& col : model_paths)
        if (col.size() != returns.size())
            throw std::invalid_argument(
                "estimate_combination_weights: column/return length mismatch");
    if (!(level > 0.0) || !(level < 0.5))
        throw std::invalid_argument("estimate_combination_weights: level must lie in (0, 0.5)");

    const std::size_t k = model_paths.size();
    std::vector<double> center(k + 1, 1.0 / static_cast<double>(k));
    center[0] = 0.0;
    auto starts = multi_start_grid(center, opt.n_random, std::vector<double>(k + 1, 0.5),
                                   mix_seed(opt.seed, 0xC04B));
    if (opt.warm && opt.warm->c.size() == k + 1) starts.push_back(opt.warm->c);

    const auto obj = [&](const std::vector<double>& c) {
        return combination_loss(c, model_paths, returns, level);
    };
    const OptimizeResult res = minimize_nonsmooth(obj, starts, opt.optimizer);
    if (!res.converged)
        throw CombinerConvergenceError("estimate_combination_weights: optimizer did not converge",
                                       CombinationWeights{res.x});
    return CombinationWeights{res.x};
}

double combine(std::span<const double> row, const CombinationWeights& w) {
    if (w.c.size() != row.size() + 1)
        throw std::invalid_argument("combine: weight/row dimension mismatch");
    double q = w.c[0];
    for (std::size_t i = 0; i < row.size(); ++i) q += w.c[i + 1] * row[i];
    return q;
}

std::vector<double> monotonize(std::vector<double> row) {
    std::sort(row.begin(), row.end());
    return row;
}

}  // namespace fcwq
