#include "fcwq/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>

#include "fcwq/distributions.hpp"
#include "fcwq/scoring.hpp"

namespace fcwq {
namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

void check_lengths(std::size_t a, std::size_t b, const char* who) {
    if (a != b) throw std::invalid_argument(std::string(who) + ": length mismatch");
    if (a == 0) throw std::invalid_argument(std::string(who) + ": empty input");
}

using Matrix = std::vector<std::vector<double>>;

// Gaussian elimination with partial pivoting on [a | rhs columns]; a is
// consumed. Throws on a singular pivot.
Matrix solve_augmented(Matrix a, Matrix rhs) {
    const std::size_t k = a.size();
    double scale = 0.0;
    for (const auto& row : a)
        for (double v : row) scale = std::max(scale, std::abs(v));
    if (scale == 0.0) throw std::runtime_error("singular design");
    for (std::size_t col = 0; col < k; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < k; ++r)
            if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
        if (std::abs(a[pivot][col]) <= 1e-12 * scale) throw std::runtime_error("singular design");
        std::swap(a[col], a[pivot]);
        std::swap(rhs[col], rhs[pivot]);
        for (std::size_t r = 0; r < k; ++r) {
            if (r == col) continue;
            const double f = a[r][col] / a[col][col];
            if (f == 0.0) continue;
            for (std::size_t c = col; c < k; ++c) a[r][c] -= f * a[col][c];
            for (std::size_t c = 0; c < rhs[r].size(); ++c) rhs[r][c] -= f * rhs[col][c];
        }
    }
    for (std::size_t r = 0; r < k; ++r)
        for (std::size_t c = 0; c < rhs[r].size(); ++c) rhs[r][c] /= a[r][r];
    return rhs;
}

Matrix cross_product(const Matrix& x) {
    const std::size_t k = x[0].size();
    Matrix a(k, std::vector<double>(k, 0.0));
    for (const auto& row : x)
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = 0; j < k; ++j) a[i][j] += row[i] * row[j];
    return a;
}

struct Ols {
    std::vector<double> beta;
    std::vector<double> residuals;
};

Ols ols_fit(const Matrix& x, std::span<const double> y) {
    const std::size_t n = x.size();
    const std::size_t k = x[0].size();
    Matrix xty(k, std::vector<double>(1, 0.0));
    for (std::size_t t = 0; t < n; ++t)
        for (std::size_t i = 0; i < k; ++i) xty[i][0] += x[t][i] * y[t];
    Matrix sol = solve_augmented(cross_product(x), std::move(xty));
    Ols out;
    out.beta.resize(k);
    for (std::size_t i = 0; i < k; ++i) out.beta[i] = sol[i][0];
    out.residuals.resize(n);
    for (std::size_t t = 0; t < n; ++t) {
        double fit = 0.0;
        for (std::size_t i = 0; i < k; ++i) fit += x[t][i] * out.beta[i];
        out.residuals[t] = y[t] - fit;
    }
    return out;
}

// Shared MZ-style machinery: y_t regressed on [1, driver_t, y_{t-1}],
// observations 2..H, joint Wald of all coefficients = 0 against
// chi-square(3). The Wald covariance is the null-implied sigma2 (X'X)^{-1}
// (under the null the residuals are serially uncorrelated, so the sandwich
// collapses); null_var >= 0 supplies the known residual variance, negative
// requests the in-sample estimate.
double lagged_wald_test(std::span<const double> resid, std::span<const double> driver,
                        double null_var) {
    const std::size_t h = resid.size();
    Matrix x(h - 1, std::vector<double>(3));
    std::vector<double> y(h - 1);
    for (std::size_t t = 1; t < h; ++t) {
        x[t - 1] = {1.0, driver[t], resid[t - 1]};
        y[t - 1] = resid[t];
    }
    const Ols fit = ols_fit(x, y);
    double s2 = null_var;
    if (s2 < 0.0) {
        double sse = 0.0;
        for (double r : fit.residuals) sse += r * r;
        s2 = sse / static_cast<double>(fit.residuals.size());
    }
    if (!(s2 > 0.0)) throw std::runtime_error("singular design");
    const Matrix xtx = cross_product(x);
    double w = 0.0;
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) w += fit.beta[i] * xtx[i][j] * fit.beta[j];
    w /= s2;
    if (!(w >= 0.0)) w = 0.0;  // PSD up to rounding
    return chi2_sf(w, 3);
}

}  // namespace

double vrate(std::span<const double> returns, std::span<const double> var_forecasts,
             double alpha) {
    check_lengths(returns.size(), var_forecasts.size(), "vrate");
    if (alpha <= 0.0 || alpha >= 1.0) throw std::invalid_argument("vrate: alpha out of range");
    std::size_t hits = 0;
    for (std::size_t t = 0; t < returns.size(); ++t)
        if (returns[t] < var_forecasts[t]) ++hits;
    return static_cast<double>(hits) / static_cast<double>(returns.size());
}

double aggregate_quantile_loss(std::span<const double> returns,
                               std::span<const double> var_forecasts, double alpha) {
    check_lengths(returns.size(), var_forecasts.size(), "aggregate_quantile_loss");
    double sum = 0.0;
    for (std::size_t t = 0; t < returns.size(); ++t)
        sum += quantile_loss(returns[t], var_forecasts[t], alpha);
    return sum;
}

double aggregate_joint_loss(std::span<const double> returns,
                            std::span<const RiskForecast> forecasts, double alpha) {
    check_lengths(returns.size(), forecasts.size(), "aggregate_joint_loss");
    std::string bad;
    for (std::size_t t = 0; t < forecasts.size(); ++t) {
        if (forecasts[t].es < 0.0) continue;
        if (!bad.empty()) bad += ", ";
        bad += std::to_string(t);
    }
    if (!bad.empty())
        throw std::invalid_argument("aggregate_joint_loss: es >= 0 at rows " + bad);
    double sum = 0.0;
    for (std::size_t t = 0; t < returns.size(); ++t)
        sum += al_joint_score(returns[t], forecasts[t], alpha);
    return sum;
}

double mean_abs_dev(std::span<const double> values, double target) {
    if (values.empty()) throw std::invalid_argument("mean_abs_dev: empty input");
    double sum = 0.0;
    for (double v : values) sum += std::abs(v - target);
    return sum / static_cast<double>(values.size());
}

std::vector<std::vector<double>> newey_west_cov(const std::vector<std::vector<double>>& x,
                                                std::span<const double> residuals, int lags) {
    const std::size_t n = x.size();
    if (n == 0) throw std::invalid_argument("newey_west_cov: empty design");
    const std::size_t k = x[0].size();
    if (n <= k) throw std::invalid_argument("newey_west_cov: more columns than rows");
    if (residuals.size() != n) throw std::invalid_argument("newey_west_cov: length mismatch");
    if (lags < 0) throw std::invalid_argument("newey_west_cov: negative lag count");

    // Score vectors s_t = x_t e_t.
    Matrix s(n, std::vector<double>(k));
    for (std::size_t t = 0; t < n; ++t)
        for (std::size_t i = 0; i < k; ++i) s[t][i] = x[t][i] * residuals[t];

    Matrix meat(k, std::vector<double>(k, 0.0));
    for (std::size_t t = 0; t < n; ++t)
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = 0; j < k; ++j) meat[i][j] += s[t][i] * s[t][j];
    for (int l = 1; l <= lags && static_cast<std::size_t>(l) < n; ++l) {
        const double w = 1.0 - static_cast<double>(l) / (lags + 1.0);
        for (std::size_t t = static_cast<std::size_t>(l); t < n; ++t)
            for (std::size_t i = 0; i < k; ++i)
                for (std::size_t j = 0; j < k; ++j) {
                    const double g = s[t][i] * s[t - l][j];
                    meat[i][j] += w * g;
                    meat[j][i] += w * g;
                }
    }

    Matrix identity(k, std::vector<double>(k, 0.0));
    for (std::size_t i = 0; i < k; ++i) identity[i][i] = 1.0;
    Matrix bread = solve_augmented(cross_product(x), std::move(identity));

    // bread * meat * bread
    Matrix tmp(k, std::vector<double>(k, 0.0));
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t l = 0; l < k; ++l)
            for (std::size_t j = 0; j < k; ++j) tmp[i][j] += bread[i][l] * meat[l][j];
    Matrix cov(k, std::vector<double>(k, 0.0));
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t l = 0; l < k; ++l)
            for (std::size_t j = 0; j < k; ++j) cov[i][j] += tmp[i][l] * bread[l][j];
    return cov;
}

double var_calibration_test(std::span<const double> returns,
                            std::span<const double> var_forecasts, double alpha) {
    check_lengths(returns.size(), var_forecasts.size(), "var_calibration_test");
    if (returns.size() <= 50)
        throw std::invalid_argument("var_calibration_test: needs more than 50 observations");
    std::vector<double> u(returns.size());
    for (std::size_t t = 0; t < returns.size(); ++t)
        u[t] = alpha - (returns[t] <= var_forecasts[t] ? 1.0 : 0.0);
    // Under the null the generalized residual has known variance alpha(1-alpha).
    return lagged_wald_test(u, var_forecasts, alpha * (1.0 - alpha));
}

double es_calibration_test(std::span<const double> returns,
                           std::span<const RiskForecast> forecasts, double alpha) {
    check_lengths(returns.size(), forecasts.size(), "es_calibration_test");
    if (returns.size() <= 50)
        throw std::invalid_argument("es_calibration_test: needs more than 50 observations");
    std::vector<double> e(returns.size());
    std::vector<double> es(returns.size());
    for (std::size_t t = 0; t < returns.size(); ++t) {
        if (!(forecasts[t].es < 0.0))
            throw std::invalid_argument("es_calibration_test: es >= 0 at row " +
                                        std::to_string(t));
        es[t] = forecasts[t].es;
        const bool hit = returns[t] <= forecasts[t].var;
        e[t] = hit ? (returns[t] - es[t]) / (alpha * std::abs(es[t])) : 0.0;
    }
    // The shortfall residual has no closed-form null variance; estimate it.
    return lagged_wald_test(e, es, -1.0);
}

BacktestReport build_report(const std::vector<ModelForecasts>& models,
                            std::span<const double> returns, double alpha) {
    BacktestReport report;
    report.alpha = alpha;
    report.h = static_cast<int>(returns.size());
    for (const ModelForecasts& mf : models) {
        check_lengths(returns.size(), mf.forecasts.size(), "build_report");
        ModelMetrics mm;
        mm.name = mf.name;
        std::vector<double> var_path(mf.forecasts.size());
        for (std::size_t t = 0; t < mf.forecasts.size(); ++t) var_path[t] = mf.forecasts[t].var;
        mm.vrate = vrate(returns, var_path, alpha);
        mm.vrate_ratio = mm.vrate / alpha;
        mm.abs_dev = std::abs(mm.vrate - alpha);
        mm.aggregate_ql = aggregate_quantile_loss(returns, var_path, alpha);
        mm.ql_series.resize(returns.size());
        for (std::size_t t = 0; t < returns.size(); ++t)
            mm.ql_series[t] = quantile_loss(returns[t], var_path[t], alpha);
        const bool es_valid = std::all_of(mf.forecasts.begin(), mf.forecasts.end(),
                                          [](const RiskForecast& f) { return f.es < 0.0; });
        if (es_valid) {
            mm.aggregate_joint = aggregate_joint_loss(returns, mf.forecasts, alpha);
            mm.joint_series.resize(returns.size());
            for (std::size_t t = 0; t < returns.size(); ++t)
                mm.joint_series[t] = al_joint_score(returns[t], mf.forecasts[t], alpha);
        } else {
            mm.aggregate_joint = kNan;
        }
        try {
            mm.p_var = var_calibration_test(returns, var_path, alpha);
        } catch (const std::exception&) {
            mm.p_var = kNan;
        }
        if (es_valid) {
            try {
                mm.p_es = es_calibration_test(returns, mf.forecasts, alpha);
            } catch (const std::exception&) {
                mm.p_es = kNan;
            }
        } else {
            mm.p_es = kNan;
        }
        report.models.push_back(std::move(mm));
    }

    auto mark = [&](auto metric, auto best_flag, auto second_flag) {
        std::vector<double> values;
        for (const ModelMetrics& mm : report.models)
            if (std::isfinite(metric(mm))) values.push_back(metric(mm));
        if (values.empty()) return;
        std::sort(values.begin(), values.end());
        values.erase(std::unique(values.begin(), values.end()), values.end());
        for (ModelMetrics& mm : report.models) {
            if (!std::isfinite(metric(mm))) continue;
            if (metric(mm) == values[0]) best_flag(mm);
            else if (values.size() > 1 && metric(mm) == values[1]) second_flag(mm);
        }
    };
    mark([](const ModelMetrics& mm) { return mm.aggregate_ql; },
         [](ModelMetrics& mm) { mm.best_ql = true; },
         [](ModelMetrics& mm) { mm.second_ql = true; });
    mark([](const ModelMetrics& mm) { return mm.aggregate_joint; },
         [](ModelMetrics& mm) { mm.best_joint = true; },
         [](ModelMetrics& mm) { mm.second_joint = true; });
    return report;
}

}  // namespace fcwq
