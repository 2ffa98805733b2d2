#pragma once

namespace fcwq {

// Standard Student-t with nu degrees of freedom.
double t_pdf(double x, double nu);
double t_cdf(double x, double nu);
double t_quantile(double p, double nu);

// Left-tail mean of the standard t below its p-quantile (negative for p<0.5).
double t_es_standard(double p, double nu);

// Unit-variance (standardized) Student-t; requires nu > 2.
double t_quantile_std(double p, double nu);
double t_es_std(double p, double nu);

// E|Z| for the standardized Student-t; enters the EGARCH magnitude term.
double t_abs_moment_std(double nu);

// Inverse-CDF draw from the standardized t given a uniform u in (0,1).
double sample_t_std(double u, double nu);

// Upper-tail probability of the chi-square distribution.
double chi2_sf(double x, int df);

}  // namespace fcwq
