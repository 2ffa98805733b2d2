#pragma once

#include <span>
#include <vector>

#include "fcwq/garch.hpp"
#include "fcwq/types.hpp"

namespace fcwq {

enum class TailMethod { Pot, Fhs };

// Left-tail quantile multipliers on the standardized-residual scale; the
// one-step (VaR, ES) forecast is sigma_forecast times (q, c).
struct TailFit {
    TailMethod method = TailMethod::Fhs;
    std::vector<double> levels;
    std::vector<double> q;  // strictly increasing across levels, q[j] < 0
    std::vector<double> c;  // tail means, c[j] < q[j]
    // POT diagnostics (zero for FHS):
    double xi = 0.0;
    double beta = 0.0;       // GPD scale, > 0 for POT
    double threshold = 0.0;  // on the standardized-residual scale
    int exceedances = 0;
};

// Generalized-Pareto left-tail formulas on the standardized scale, exposed
// for direct verification. zeta is the empirical mass below the threshold u;
// requires p < zeta and xi < 1.
double gpd_quantile(double u, double xi, double beta, double zeta, double p);
double gpd_tail_mean(double u, double xi, double beta, double zeta, double p);

// Fits a GPD by maximum likelihood to exceedances below the threshold_frac
// empirical quantile of the standardized residuals. Errors: xi >= 1
// (infinite tail mean) or fewer than 30 exceedances.
TailFit pot_tail(const GarchFit& fit, std::span<const double> window,
                 const std::vector<double>& levels, double threshold_frac = 0.10);

// Empirical tail of the standardized residuals: q = order statistic at
// ceil(N*level), c = mean strictly below it. Errors: fewer than 2
// observations below the lowest-level quantile.
TailFit fhs_tail(const GarchFit& fit, std::span<const double> window,
                 const std::vector<double>& levels);

// Scales the multipliers by sigma_forecast into (VaR, ES) per level.
std::vector<RiskForecast> tail_var_es(const GarchFit& fit, const TailFit& tail);

}  // namespace fcwq
