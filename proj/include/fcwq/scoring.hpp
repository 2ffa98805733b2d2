#pragma once

#include <functional>
#include <span>

#include "fcwq/types.hpp"

namespace fcwq {

// Check loss (alpha - I(r<q)) * (r - q); nonnegative, zero iff r == q.
double quantile_loss(double r, double q, double alpha);

// Joint (VaR, ES) log score -log((alpha-1)/ES) - (r-Q)(alpha-I(r<Q))/(alpha*ES).
// Requires es < 0; throws std::domain_error otherwise.
double al_joint_score(double r, const RiskForecast& f, double alpha);

// Joint scoring family with pluggable choice functions. Caller contract:
// g1 increasing; g2 strictly increasing and convex with g2 = h'; a integrable.
struct FzFamily {
    std::function<double(double)> g1;
    std::function<double(double)> g2;
    std::function<double(double)> h;
    std::function<double(double)> a;  // function of the realization r
};

// The member paired with al_joint_score: g1=0, g2(x)=-1/x, h(x)=-log(-x),
// a = 1 - log(1-alpha). The two scores differ pointwise by exactly -r/ES,
// which has zero expectation for zero-mean returns.
FzFamily fz_al_family(double alpha);

double fz_score(double r, const RiskForecast& f, double alpha, const FzFamily& fam);

// Arithmetic mean; empty input is an error.
double mean_score(std::span<const double> scores);

}  // namespace fcwq
