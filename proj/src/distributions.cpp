#include "fcwq/distributions.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <stdexcept>

namespace fcwq {

namespace {

void check_nu(double nu, double lower) {
    if (!(nu > lower))
        throw std::invalid_argument("degrees of freedom must exceed " + std::to_string(lower));
}

void check_p(double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("probability must lie in (0,1)");
}

}  // namespace

double t_pdf(double x, double nu) {
    check_nu(nu, 0.0);
    return boost::math::pdf(boost::math::students_t_distribution<double>(nu), x);
}

double t_cdf(double x, double nu) {
    check_nu(nu, 0.0);
    return boost::math::cdf(boost::math::students_t_distribution<double>(nu), x);
}

double t_quantile(double p, double nu) {
    check_nu(nu, 0.0);
    check_p(p);
    return boost::math::quantile(boost::math::students_t_distribution<double>(nu), p);
}

double t_es_standard(double p, double nu) {
    check_nu(nu, 1.0);
    check_p(p);
    const double tq = t_quantile(p, nu);
    return -t_pdf(tq, nu) * (nu + tq * tq) / (p * (nu - 1.0));
}

double t_quantile_std(double p, double nu) {
    check_nu(nu, 2.0);
    return t_quantile(p, nu) * std::sqrt((nu - 2.0) / nu);
}

double t_es_std(double p, double nu) {
    check_nu(nu, 2.0);
    return t_es_standard(p, nu) * std::sqrt((nu - 2.0) / nu);
}

double t_abs_moment_std(double nu) {
    check_nu(nu, 2.0);
    return 2.0 * std::sqrt(nu - 2.0) *
           std::exp(std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu)) /
           (std::sqrt(M_PI) * (nu - 1.0));
}

double sample_t_std(double u, double nu) { return t_quantile_std(u, nu); }

double chi2_sf(double x, int df) {
    if (df < 1) throw std::invalid_argument("chi-square df must be positive");
    if (!(x >= 0.0)) throw std::invalid_argument("chi-square statistic must be nonnegative");
    return boost::math::cdf(
        boost::math::complement(boost::math::chi_squared_distribution<double>(df), x));
}

}  // namespace fcwq
