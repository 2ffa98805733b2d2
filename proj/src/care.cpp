#include "fcwq/care.hpp"

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
        throw std::invalid_argument("care: window shorter than 250 observations");
    if (!(level > 0.0) || !(level < 0.5))
        throw std::invalid_argument("care: level must lie in (0, 0.5)");
}

double mu_start(std::span<const double> window, double tau) {
    const std::size_t n = std::min<std::size_t>(window.size(), 100);
    return expectile(window.first(n), tau);
}

}  // namespace

double expectile(std::span<const double> x, double tau) {
    if (x.empty()) throw std::invalid_argument("expectile: empty sample");
    if (!(tau > 0.0) || !(tau < 1.0))
        throw std::invalid_argument("expectile: tau must lie in (0, 1)");
    double mu = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
    for (int it = 0; it < 200; ++it) {
        double num = 0.0, den = 0.0;
        for (const double v : x) {
            const double w = v < mu ? 1.0 - tau : tau;
            num += w * v;
            den += w;
        }
        const double next = num / den;
        const bool done = std::abs(next - mu) <= 1e-12 * (1.0 + std::abs(next));
        mu = next;
        if (done) break;
    }
    return mu;
}

std::vector<double> care_path(const std::array<double, 4>& betas,
                              std::span<const double> window, double tau) {
    const std::size_t n = window.size();
    std::vector<double> mu(n + 1);
    mu[0] = mu_start(window, tau);
    for (std::size_t t = 1; t <= n; ++t) {
        const double rp = window[t - 1];
        mu[t] = betas[0] + betas[1] * mu[t - 1] + (rp >= 0.0 ? betas[2] : betas[3]) * std::abs(rp);
    }
    return mu;
}

double care_objective(const std::array<double, 4>& betas, std::span<const double> window,
                      double tau) {
    const std::size_t n = window.size();
    double mu = mu_start(window, tau);
    double loss = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        if (t > 0) {
            const double rp = window[t - 1];
            mu = betas[0] + betas[1] * mu + (rp >= 0.0 ? betas[2] : betas[3]) * std::abs(rp);
        }
        const double d = window[t] - mu;
        loss += (d < 0.0 ? 1.0 - tau : tau) * d * d;
    }
    if (!std::isfinite(loss)) return kInf;
    return loss / static_cast<double>(n);
}

std::size_t select_tau(std::span<const double> vrates, double level) {
    std::size_t best = vrates.size();
    double best_d = kInf;
    for (std::size_t k = 0; k < vrates.size(); ++k) {
        if (!(vrates[k] > 0.0)) continue;
        const double d = std::abs(vrates[k] - level);
        if (d < best_d) {
            best_d = d;
            best = k;
        }
    }
    if (best == vrates.size())
        throw std::runtime_error("care: no expectile level produced any violations");
    return best;
}

CareFit fit_care_as(std::span<const double> window, double level, const CareOptions& opt) {
    check_inputs(window, level);
    if (opt.grid_size < 1) throw std::invalid_argument("care: grid_size must be positive");
    const int n = static_cast<int>(window.size());
    const int nc = std::max(opt.n_candidates, 1);

    std::vector<double> b0(nc), b1(nc), b2(nc), b3(nc);
    Rng rng(mix_seed(opt.seed, 0xCA8E));
    for (int c = 0; c < nc; ++c) {
        b0[c] = rng.uniform(-1.0, 1.0);
        b1[c] = rng.uniform(0.0, 1.0);
        b2[c] = rng.uniform(-1.0, 1.0);
        b3[c] = rng.uniform(-1.0, 1.0);
    }

    // One path pass per candidate. The squared residual splits into all-t and
    // negative-side sums, so the loss at any tau is tau*s1 + (1-2*tau)*s2.
    const double m0 = mu_start(window, level);
    std::vector<double> mu(nc, m0), s1(nc, 0.0), s2(nc, 0.0);
    for (int t = 0; t < n; ++t) {
        if (t > 0) {
            const double rp = window[t - 1];
            const double a = std::abs(rp);
            const double* m = rp >= 0.0 ? b2.data() : b3.data();
            for (int c = 0; c < nc; ++c) mu[c] = b0[c] + b1[c] * mu[c] + m[c] * a;
        }
        const double r = window[t];
        for (int c = 0; c < nc; ++c) {
            const double d = r - mu[c];
            const double dd = d * d;
            s1[c] += dd;
            s2[c] += d < 0.0 ? dd : 0.0;
        }
    }
    for (int c = 0; c < nc; ++c) {
        if (!std::isfinite(s1[c]) || !std::isfinite(s2[c])) {
            s1[c] = kInf;
            s2[c] = 0.0;
        }
    }

    const int keep = std::min(std::max(opt.n_refine, 1), nc);
    std::vector<int> order(nc);
    std::vector<double> loss(nc);
    std::vector<std::array<double, 4>> grid_betas(opt.grid_size);
    std::vector<double> grid_obj(opt.grid_size), grid_vrate(opt.grid_size);
    std::array<double, 4> chain{};
    bool have_chain = false;

    for (int k = 0; k < opt.grid_size; ++k) {
        const double tau = level * static_cast<double>(k + 1) / static_cast<double>(opt.grid_size);
        for (int c = 0; c < nc; ++c) loss[c] = tau * s1[c] + (1.0 - 2.0 * tau) * s2[c];
        std::iota(order.begin(), order.end(), 0);
        std::partial_sort(order.begin(), order.begin() + keep, order.end(), [&](int a, int b) {
            if (loss[a] != loss[b]) return loss[a] < loss[b];
            return a < b;
        });

        std::vector<std::array<double, 4>> starts;
        starts.reserve(static_cast<std::size_t>(keep) + 2);
        for (int i = 0; i < keep; ++i) {
            const int c = order[i];
            starts.push_back({b0[c], b1[c], b2[c], b3[c]});
        }
        if (have_chain) starts.push_back(chain);
        if (opt.warm) starts.push_back(opt.warm->betas);

        const auto obj = [&window, tau](const std::vector<double>& x) {
            return care_objective({x[0], x[1], x[2], x[3]}, window, tau);
        };
        std::array<double, 4> best{};
        double best_val = kInf;
        for (const auto& s : starts) {
            const OptimizeResult res = nelder_mead(obj, {s[0], s[1], s[2], s[3]}, opt.optimizer);
            if (res.value < best_val) {
                best_val = res.value;
                best = {res.x[0], res.x[1], res.x[2], res.x[3]};
            }
        }
        if (!std::isfinite(best_val))
            throw std::runtime_error("fit_care_as: no candidate produced a finite objective");
        chain = best;
        have_chain = true;

        const std::vector<double> path = care_path(best, window, tau);
        int hits = 0;
        for (int t = 0; t < n; ++t)
            if (window[t] < path[t]) ++hits;
        grid_betas[k] = best;
        grid_obj[k] = best_val;
        grid_vrate[k] = static_cast<double>(hits) / static_cast<double>(n);
    }

    const std::size_t star = select_tau(grid_vrate, level);
    CareFit fit;
    fit.betas = grid_betas[star];
    fit.tau_star =
        level * static_cast<double>(star + 1) / static_cast<double>(opt.grid_size);
    const std::vector<double> path = care_path(fit.betas, window, fit.tau_star);
    fit.mu_path.assign(path.begin(), path.end() - 1);
    fit.mu_forecast = path.back();
    fit.var_forecast = fit.mu_forecast;
    fit.vrate = grid_vrate[star];
    fit.objective = grid_obj[star];

    double tail_sum = 0.0, mu_sum = 0.0;
    int hits = 0;
    for (int t = 0; t < n; ++t) {
        mu_sum += fit.mu_path[t];
        if (window[t] < fit.mu_path[t]) {
            tail_sum += window[t];
            ++hits;
        }
    }
    const double mu_mean = mu_sum / static_cast<double>(n);
    if (std::abs(mu_mean) < 1e-12)
        throw std::runtime_error("fit_care_as: degenerate expectile path mean");
    fit.es_forecast = (tail_sum / static_cast<double>(hits)) / mu_mean * fit.mu_forecast;
    return fit;
}

}  // namespace fcwq
