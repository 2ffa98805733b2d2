#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "fcwq/caviar.hpp"

namespace fcwq {

// VaR-to-ES link used by the semiparametric joint benchmarks. The additive
// relation subtracts a positive gap, the multiplicative one scales the
// quantile up in magnitude; both keep ES below the quantile whenever the
// quantile is negative.
enum class EsRelation { Additive, Multiplicative };

double es_from_var(EsRelation relation, double q, double gamma0);

struct EsCaviarFit {
    EsRelation relation = EsRelation::Additive;
    std::array<double, 4> betas{};
    double gamma0 = 0.0;
    std::vector<double> q_path;
    double q_forecast = 0.0;
    double es_forecast = 0.0;
    double objective = 0.0;  // mean joint (VaR, ES) score in sample
};

struct EsCaviarOptions {
    std::uint64_t seed = 0;
    int n_random = 4;  // random gap starts beyond the fixed ones
    const EsCaviarFit* warm = nullptr;
    OptimizeOptions optimizer{1e-7, 2000};
    CaviarOptions caviar{};
};

// Mean joint score of the quantile recursion plus linked ES path; +inf when
// any linked ES fails to be strictly negative.
double es_caviar_objective(const std::array<double, 4>& betas, double gamma0,
                           std::span<const double> window, double level,
                           EsRelation relation);

// Two-stage fit: the quantile-loss CAViaR fit seeds the slopes, then all five
// parameters jointly minimize the mean joint score from several gap starts.
EsCaviarFit fit_es_caviar(std::span<const double> window, double level, EsRelation relation,
                          const EsCaviarOptions& opt = {});

}  // namespace fcwq
