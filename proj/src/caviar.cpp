#include "fcwq/caviar.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "fcwq/rng.hpp"

namespace fcwq {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_inputs(std::span<const double> window, double level) {
    if (window.size() < 250)
        throw std::invalid_argument("caviar: window shorter than 250 observations");
    if (!(level > 0.0) || !(level < 0.5))
        throw std::invalid_argument("caviar: level must lie in (0, 0.5)");
}

}  // namespace

double caviar_q1(std::span<const double> window, double level) {
    const std::size_t n = std::min<std::size_t>(window.size(), 100);
    std::vector<double> head(window.begin(), window.begin() + n);
    std::sort(head.begin(), head.end());
    const std::size_t k = static_cast<std::size_t>(std::ceil(level * static_cast<double>(n)));
    return head[std::max<std::size_t>(k, 1) - 1];
}

std::vector<double> caviar_path(const std::array<double, 4>& betas,
                                std::span<const double> window, double level) {
    const std::size_t n = window.size();
    std::vector<double> q(n + 1);
    q[0] = caviar_q1(window, level);
    for (std::size_t t = 1; t <= n; ++t) {
        const double rp = window[t - 1];
        const double slope = rp >= 0.0 ? betas[2] : betas[3];
        q[t] = betas[0] + betas[1] * q[t - 1] + slope * std::abs(rp);
    }
    return q;
}

double caviar_objective(const std::array<double, 4>& betas, std::span<const double> window,
                        double level) {
    const std::size_t n = window.size();
    double q = caviar_q1(window, level);
    double loss = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        if (t > 0) {
            const double rp = window[t - 1];
            q = betas[0] + betas[1] * q + (rp >= 0.0 ? betas[2] : betas[3]) * std::abs(rp);
        }
        const double d = window[t] - q;
        loss += level * d - (d < 0.0 ? d : 0.0);
    }
    if (!std::isfinite(loss)) return kInf;
    return loss / static_cast<double>(n);
}

CaviarFit fit_caviar_as(std::span<const double> window, double level, const CaviarOptions& opt) {
    check_inputs(window, level);
    const int n = static_cast<int>(window.size());
    const int nc = std::max(opt.n_candidates, 1);
    const double q1 = caviar_q1(window, level);

    // Uniform candidates, scored with the recursion vectorized across
    // candidates (the per-t slope selection is hoisted to a pointer swap).
    std::vector<double> b0(nc), b1(nc), b2(nc), b3(nc);
    Rng rng(mix_seed(opt.seed, 0xCA51));
    for (int c = 0; c < nc; ++c) {
        b0[c] = rng.uniform(-1.0, 1.0);
        b1[c] = rng.uniform(0.0, 1.0);
        b2[c] = rng.uniform(-1.0, 1.0);
        b3[c] = rng.uniform(-1.0, 1.0);
    }
    std::vector<double> q(nc, q1), loss(nc, 0.0);
    for (int t = 0; t < n; ++t) {
        if (t > 0) {
            const double rp = window[t - 1];
            const double a = std::abs(rp);
            const double* m = rp >= 0.0 ? b2.data() : b3.data();
            for (int c = 0; c < nc; ++c) q[c] = b0[c] + b1[c] * q[c] + m[c] * a;
        }
        const double r = window[t];
        for (int c = 0; c < nc; ++c) {
            const double d = r - q[c];
            loss[c] += level * d - (d < 0.0 ? d : 0.0);
        }
    }

    for (int c = 0; c < nc; ++c)
        if (!std::isfinite(loss[c])) loss[c] = kInf;

    const int keep = std::min(std::max(opt.n_refine, 1), nc);
    std::vector<int> order(nc);
    std::iota(order.begin(), order.end(), 0);
    std::partial_sort(order.begin(), order.begin() + keep, order.end(), [&](int a, int b) {
        if (loss[a] != loss[b]) return loss[a] < loss[b];
        return a < b;
    });

    std::vector<std::array<double, 4>> starts;
    starts.reserve(static_cast<std::size_t>(keep) + 1);
    for (int i = 0; i < keep; ++i) {
        const int c = order[i];
        starts.push_back({b0[c], b1[c], b2[c], b3[c]});
    }
    if (opt.warm) starts.push_back(opt.warm->betas);

    const auto obj = [&window, level](const std::vector<double>& x) {
        return caviar_objective({x[0], x[1], x[2], x[3]}, window, level);
    };
    CaviarFit best;
    double best_val = kInf;
    for (const auto& s : starts) {
        const OptimizeResult res =
            nelder_mead(obj, {s[0], s[1], s[2], s[3]}, opt.optimizer);
        if (res.value < best_val) {
            best_val = res.value;
            best.betas = {res.x[0], res.x[1], res.x[2], res.x[3]};
        }
    }
    if (!std::isfinite(best_val))
        throw std::runtime_error("fit_caviar_as: no candidate produced a finite objective");

    const std::vector<double> path = caviar_path(best.betas, window, level);
    best.q_path.assign(path.begin(), path.end() - 1);
    best.q_forecast = path.back();
    best.objective = best_val;
    return best;
}

}  // namespace fcwq
