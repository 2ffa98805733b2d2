#include "fcwq/tails.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace fcwq {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Profile GPD log-likelihood over eta = xi/beta given exceedances y > 0:
// xi(eta) = mean log(1 + eta y), beta = xi/eta, l = -m log(beta) - m (xi + 1).
double profile_loglik(const std::vector<double>& y, double eta, double& xi_out,
                      double& beta_out) {
    const int m = static_cast<int>(y.size());
    if (std::abs(eta) < 1e-12) {  // exponential limit
        double mean = 0.0;
        for (double v : y) mean += v;
        mean /= m;
        xi_out = 0.0;
        beta_out = mean;
        return -m * std::log(mean) - m;
    }
    double acc = 0.0;
    for (double v : y) {
        const double a = 1.0 + eta * v;
        if (!(a > 0.0)) return -kInf;
        acc += std::log(a);
    }
    const double xi = acc / m;
    const double beta = xi / eta;
    if (!(beta > 0.0)) return -kInf;
    xi_out = xi;
    beta_out = beta;
    return -m * std::log(beta) - m * (xi + 1.0);
}

}  // namespace

double gpd_quantile(double u, double xi, double beta, double zeta, double p) {
    if (!(p > 0.0) || !(p < zeta)) throw std::invalid_argument("gpd_quantile: need 0 < p < zeta");
    if (!(beta > 0.0)) throw std::invalid_argument("gpd_quantile: scale must be positive");
    const double lr = std::log(zeta / p);
    if (std::abs(xi) < 1e-10) return u - beta * lr;
    return u - (beta / xi) * (std::exp(xi * lr) - 1.0);
}

double gpd_tail_mean(double u, double xi, double beta, double zeta, double p) {
    if (!(xi < 1.0)) throw std::invalid_argument("gpd_tail_mean: xi >= 1 has no finite mean");
    const double q = gpd_quantile(u, xi, beta, zeta, p);
    return q - (beta + xi * (u - q)) / (1.0 - xi);
}

TailFit pot_tail(const GarchFit& fit, std::span<const double> window,
                 const std::vector<double>& levels, double threshold_frac) {
    if (!(threshold_frac > 0.05 && threshold_frac <= 0.2))
        throw std::invalid_argument("pot_tail: threshold_frac must lie in (0.05, 0.2]");
    if (levels.empty()) throw std::invalid_argument("pot_tail: empty level grid");
    std::vector<double> z = standardized_residuals(fit, window);
    const int n = static_cast<int>(z.size());
    std::sort(z.begin(), z.end());
    const int k = static_cast<int>(std::ceil(threshold_frac * n));
    const double u = z[static_cast<std::size_t>(k - 1)];

    std::vector<double> y;  // exceedances below the threshold, as positive distances
    y.reserve(static_cast<std::size_t>(k));
    for (double v : z) {
        if (v < u) y.push_back(u - v);
        else break;
    }
    const int m = static_cast<int>(y.size());
    if (m < 30)
        throw std::invalid_argument("pot_tail: only " + std::to_string(m) +
                                    " exceedances below the threshold (need 30)");
    const double zeta = static_cast<double>(m) / n;
    for (double a : levels)
        if (!(a < zeta))
            throw std::invalid_argument("pot_tail: level not inside the fitted tail");

    // Grid scan over eta, then golden-section refinement between the
    // bracketing neighbors of the best grid point.
    const double ymax = *std::max_element(y.begin(), y.end());
    double ymean = 0.0;
    for (double v : y) ymean += v;
    ymean /= m;
    const double lo = -0.999 / ymax;
    const double hi = 20.0 / ymean;
    const int grid = 400;
    double best_eta = 0.0, best_ll = -kInf, xi = 0.0, beta = 0.0;
    for (int i = 0; i <= grid; ++i) {
        const double eta = lo + (hi - lo) * i / grid;
        double xi_i, beta_i;
        const double ll = profile_loglik(y, eta, xi_i, beta_i);
        if (ll > best_ll) {
            best_ll = ll;
            best_eta = eta;
        }
    }
    double a = best_eta - (hi - lo) / grid, b = best_eta + (hi - lo) / grid;
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double xi_t, beta_t;
    double f1 = profile_loglik(y, x1, xi_t, beta_t);
    double f2 = profile_loglik(y, x2, xi_t, beta_t);
    for (int it = 0; it < 80; ++it) {
        if (f1 > f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = profile_loglik(y, x1, xi_t, beta_t);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = profile_loglik(y, x2, xi_t, beta_t);
        }
    }
    const double eta_star = f1 > f2 ? x1 : x2;
    const double ll_star = profile_loglik(y, eta_star, xi, beta);
    if (ll_star < best_ll) profile_loglik(y, best_eta, xi, beta);

    if (xi >= 1.0) throw std::invalid_argument("pot_tail: fitted xi >= 1, tail mean undefined");

    TailFit out;
    out.method = TailMethod::Pot;
    out.levels = levels;
    out.xi = xi;
    out.beta = beta;
    out.threshold = u;
    out.exceedances = m;
    out.q.reserve(levels.size());
    out.c.reserve(levels.size());
    for (double al : levels) {
        out.q.push_back(gpd_quantile(u, xi, beta, zeta, al));
        out.c.push_back(gpd_tail_mean(u, xi, beta, zeta, al));
    }
    return out;
}

TailFit fhs_tail(const GarchFit& fit, std::span<const double> window,
                 const std::vector<double>& levels) {
    if (levels.empty()) throw std::invalid_argument("fhs_tail: empty level grid");
    std::vector<double> z = standardized_residuals(fit, window);
    const int n = static_cast<int>(z.size());
    std::sort(z.begin(), z.end());

    TailFit out;
    out.method = TailMethod::Fhs;
    out.levels = levels;
    out.q.reserve(levels.size());
    out.c.reserve(levels.size());
    for (double al : levels) {
        const int k = static_cast<int>(std::ceil(al * n));
        if (k < 1 || k > n) throw std::invalid_argument("fhs_tail: level outside sample range");
        const double q = z[static_cast<std::size_t>(k - 1)];
        double acc = 0.0;
        int cnt = 0;
        for (int i = 0; i < n && z[static_cast<std::size_t>(i)] < q; ++i) {
            acc += z[static_cast<std::size_t>(i)];
            ++cnt;
        }
        if (cnt < 2)
            throw std::invalid_argument("fhs_tail: fewer than 2 observations below the " +
                                        std::to_string(al) + " quantile");
        out.q.push_back(q);
        out.c.push_back(acc / cnt);
    }
    return out;
}

std::vector<RiskForecast> tail_var_es(const GarchFit& fit, const TailFit& tail) {
    std::vector<RiskForecast> out;
    out.reserve(tail.levels.size());
    for (std::size_t j = 0; j < tail.levels.size(); ++j)
        out.push_back({fit.sigma_forecast * tail.q[j], fit.sigma_forecast * tail.c[j]});
    return out;
}

}  // namespace fcwq
