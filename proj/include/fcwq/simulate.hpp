#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fcwq/types.hpp"

namespace fcwq {

enum class DgpKind { GjrT, EgarchT, IidT };

// "gjr-t", "egarch-t", "iid-t"
DgpKind parse_dgp_kind(const std::string& name);

// Return generators with analytically known conditional VaR and ES. Parameter
// fields are read per kind: GJR-t uses all five; EGARCH-t reads omega,
// alpha1 (magnitude), gamma (sign), beta (persistence of log variance);
// iid-t reads only nu.
struct Dgp {
    DgpKind kind = DgpKind::GjrT;
    double omega = 0.02;
    double alpha1 = 0.05;
    double gamma = 0.10;
    double beta = 0.88;
    double nu = 8.0;
    std::uint64_t seed = 1;
    int t = 3000;
};

struct SimulatedPath {
    ReturnSeries series;
    std::vector<double> sigma;                  // conditional sd per observation
    std::vector<double> levels;
    std::vector<std::vector<double>> true_var;  // [level][obs]
    std::vector<std::vector<double>> true_es;   // [level][obs]
};

// Deterministic per (kind, seed). Truth paths are sigma_t times the
// standardized-t quantile / tail mean at each level.
SimulatedPath simulate(const Dgp& dgp, const std::vector<double>& levels);

}  // namespace fcwq
