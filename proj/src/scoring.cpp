#include "fcwq/scoring.hpp"

#include <cmath>
#include <stdexcept>

namespace fcwq {

double quantile_loss(double r, double q, double alpha) {
    if (!std::isfinite(r) || !std::isfinite(q))
        throw std::invalid_argument("quantile_loss: non-finite input");
    const double ind = r < q ? 1.0 : 0.0;
    return (alpha - ind) * (r - q);
}

double al_joint_score(double r, const RiskForecast& f, double alpha) {
    if (!(f.es < 0.0))
        throw std::domain_error("al_joint_score: es must be negative");
    if (!std::isfinite(r) || !std::isfinite(f.var) || !std::isfinite(f.es))
        throw std::invalid_argument("al_joint_score: non-finite input");
    const double ind = r < f.var ? 1.0 : 0.0;
    return -std::log((alpha - 1.0) / f.es) - (r - f.var) * (alpha - ind) / (alpha * f.es);
}

FzFamily fz_al_family(double alpha) {
    FzFamily fam;
    fam.g1 = [](double) { return 0.0; };
    fam.g2 = [](double x) { return -1.0 / x; };
    fam.h = [](double x) { return -std::log(-x); };
    fam.a = [alpha](double) { return 1.0 - std::log(1.0 - alpha); };
    return fam;
}

double fz_score(double r, const RiskForecast& f, double alpha, const FzFamily& fam) {
    if (!std::isfinite(r) || !std::isfinite(f.var) || !std::isfinite(f.es))
        throw std::invalid_argument("fz_score: non-finite input");
    const double ind = r < f.var ? 1.0 : 0.0;
    const double g2e = fam.g2(f.es);
    const double he = fam.h(f.es);
    if (!std::isfinite(g2e) || !std::isfinite(he))
        throw std::domain_error("fz_score: choice function undefined at es");
    return (ind - alpha) * fam.g1(f.var) - ind * fam.g1(r) +
           g2e * (f.es - f.var + ind / alpha * (f.var - r)) - he + fam.a(r);
}

double mean_score(std::span<const double> scores) {
    if (scores.empty()) throw std::invalid_argument("mean_score: empty input");
    double sum = 0.0;
    for (double s : scores) sum += s;
    return sum / static_cast<double>(scores.size());
}

}  // namespace fcwq
