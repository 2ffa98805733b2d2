#pragma once

#include <span>
#include <string>
#include <vector>

#include "fcwq/types.hpp"

namespace fcwq {

// Out-of-sample violation rate (1/H) sum I(r_t < VaR_t); strict inequality.
double vrate(std::span<const double> returns, std::span<const double> var_forecasts,
             double alpha);

// Sum of check losses over the out-of-sample period.
double aggregate_quantile_loss(std::span<const double> returns,
                               std::span<const double> var_forecasts, double alpha);

// Sum of joint (VaR, ES) scores; throws listing the offending rows when any
// es fails to be strictly negative.
double aggregate_joint_loss(std::span<const double> returns,
                            std::span<const RiskForecast> forecasts, double alpha);

// Mean absolute deviation from a target, e.g. violation rates across series
// against the nominal level.
double mean_abs_dev(std::span<const double> values, double target);

// HAC covariance of OLS coefficients: (X'X)^-1 S (X'X)^-1 with Bartlett
// weights 1 - l/(lags+1) on the autocovariances of x_t * e_t. x is row-major
// (one regressor row per observation). lags=0 reduces to the
// heteroskedasticity-only sandwich. Throws on a singular design.
std::vector<std::vector<double>> newey_west_cov(const std::vector<std::vector<double>>& x,
                                                std::span<const double> residuals,
                                                int lags = 20);

// Calibration regression of the generalized quantile residual
// u_t = alpha - I(r_t <= Q_t) on [1, Q_t, u_{t-1}]; Wald test that all three
// coefficients vanish, chi-square(3) p-value. The Wald covariance is the
// null-implied alpha(1-alpha) (X'X)^{-1}; a sandwich estimator is badly
// undersized here because the lagged-indicator score variance is carried by
// rare consecutive exceedances. Requires more than 50 observations.
double var_calibration_test(std::span<const double> returns,
                            std::span<const double> var_forecasts, double alpha);

// Same construction for the shortfall residual
// e_t = I(r_t <= Q_t) (r_t - ES_t) / (alpha |ES_t|) regressed on
// [1, ES_t, e_{t-1}], with the null residual variance estimated in sample.
// Requires every es < 0.
double es_calibration_test(std::span<const double> returns,
                           std::span<const RiskForecast> forecasts, double alpha);

struct ModelForecasts {
    std::string name;
    std::vector<RiskForecast> forecasts;  // aligned with the returns
};

// Per-model backtest row. Joint-loss metrics and the shortfall p-value are
// NaN when any es >= 0; degenerate calibration regressions also yield NaN
// rather than an error.
struct ModelMetrics {
    std::string name;
    double vrate = 0.0;
    double vrate_ratio = 0.0;
    double abs_dev = 0.0;  // |vrate - alpha|, the single-series MAD term
    double aggregate_ql = 0.0;
    double aggregate_joint = 0.0;
    double p_var = 0.0;
    double p_es = 0.0;
    bool best_ql = false;
    bool second_ql = false;
    bool best_joint = false;
    bool second_joint = false;
    std::vector<double> ql_series;     // per-time check loss
    std::vector<double> joint_series;  // per-time joint score, empty when invalid
};

struct BacktestReport {
    double alpha = 0.0;
    int h = 0;
    std::vector<ModelMetrics> models;
};

// Metrics per model plus best / second-best markers on the two aggregate
// losses; ties flag every model sharing the value.
BacktestReport build_report(const std::vector<ModelForecasts>& models,
                            std::span<const double> returns, double alpha);

}  // namespace fcwq
