#include "fcwq/wq_es.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "fcwq/rng.hpp"
#include "fcwq/scoring.hpp"

namespace fcwq {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

std::vector<double> beta_weights(double a, double b, int m) {
    if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("beta_weights: need a > 0, b > 0");
    if (m < 2) throw std::invalid_argument("beta_weights: need at least two levels");
    // Log-space evaluation; the Gamma normalizer cancels in the unit-sum
    // normalization, and subtracting the max keeps exp in range for any a, b.
    std::vector<double> lw(m);
    double mx = -kInf;
    for (int j = 1; j <= m; ++j) {
        const double x = static_cast<double>(j) / static_cast<double>(m + 1);
        lw[j - 1] = (a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x);
        mx = std::max(mx, lw[j - 1]);
    }
    double sum = 0.0;
    for (double& v : lw) {
        v = std::exp(v - mx);
        sum += v;
    }
    for (double& v : lw) v /= sum;
    return lw;
}

double es_from_weights(std::span<const double> row, double w0, std::span<const double> weights) {
    if (row.size() != weights.size())
        throw std::invalid_argument("es_from_weights: row/weight dimension mismatch");
    double es = w0;
    for (std::size_t j = 0; j < row.size(); ++j) es += weights[j] * row[j];
    return es;
}

double simple_average_es(std::span<const double> row) {
    if (row.empty()) throw std::invalid_argument("simple_average_es: empty row");
    double acc = 0.0;
    for (const double v : row) acc += v;
    return acc / static_cast<double>(row.size());
}

double wq_objective(const WqParams& p, const std::vector<std::span<const double>>& combined_cols,
                    std::span<const double> returns, double alpha) {
    if (!(p.a > 0.0) || !(p.b > 0.0)) return kInf;
    const std::size_t m = combined_cols.size();
    const std::vector<double> w = beta_weights(p.a, p.b, static_cast<int>(m));
    const std::span<const double> q_col = combined_cols.back();
    double acc = 0.0;
    for (std::size_t t = 0; t < returns.size(); ++t) {
        double es = p.w0;
        for (std::size_t j = 0; j < m; ++j) es += w[j] * combined_cols[j][t];
        if (!(es < 0.0)) return kInf;
        acc += al_joint_score(returns[t], {q_col[t], es}, alpha);
    }
    if (!std::isfinite(acc)) return kInf;
    return acc / static_cast<double>(returns.size());
}

WqParams estimate_wq_params(const std::vector<std::span<const double>>& combined_cols,
                            std::span<const double> returns, double alpha,
                            const WqOptions& opt) {
    if (combined_cols.size() < 2) throw std::invalid_argument("estimate_wq_params: need a grid");
    if (returns.empty()) throw std::invalid_argument("estimate_wq_params: empty window");
    for (const auto& col : combined_cols)
        if (col.size() != returns.size())
            throw std::invalid_argument("estimate_wq_params: column/return length mismatch");

    // Search over (w0, log a, log b) so positivity needs no constraint.
    const auto obj = [&](const std::vector<double>& x) {
        return wq_objective({x[0], std::exp(x[1]), std::exp(x[2])}, combined_cols, returns,
                            alpha);
    };
    auto starts = multi_start_grid({0.0, 0.0, 0.0}, opt.n_random, {0.5, 1.0, 1.0},
                                   mix_seed(opt.seed, 0x3E5));
    if (opt.warm && opt.warm->a > 0.0 && opt.warm->b > 0.0)
        starts.push_back({opt.warm->w0, std::log(opt.warm->a), std::log(opt.warm->b)});

    OptimizeResult res;
    try {
        res = minimize_smooth(obj, starts, opt.optimizer);
    } catch (const std::invalid_argument&) {
        throw std::runtime_error(
            "estimate_wq_params: no start produced a strictly negative shortfall path");
    }
    if (!res.converged)
        throw std::runtime_error("estimate_wq_params: optimizer did not converge");
    return {res.x[0], std::exp(res.x[1]), std::exp(res.x[2])};
}

}  // namespace fcwq
