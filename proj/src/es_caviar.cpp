#include "fcwq/es_caviar.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "fcwq/rng.hpp"
#include "fcwq/scoring.hpp"

namespace fcwq {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

double es_from_var(EsRelation relation, double q, double gamma0) {
    if (relation == EsRelation::Additive) return q - std::exp(gamma0);
    return (1.0 + std::exp(gamma0)) * q;
}

double es_caviar_objective(const std::array<double, 4>& betas, double gamma0,
                           std::span<const double> window, double level,
                           EsRelation relation) {
    const std::size_t n = window.size();
    double q = caviar_q1(window, level);
    double acc = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        if (t > 0) {
            const double rp = window[t - 1];
            q = betas[0] + betas[1] * q + (rp >= 0.0 ? betas[2] : betas[3]) * std::abs(rp);
        }
        const double es = es_from_var(relation, q, gamma0);
        if (!(es < 0.0)) return kInf;
        acc += al_joint_score(window[t], {q, es}, level);
    }
    if (!std::isfinite(acc)) return kInf;
    return acc / static_cast<double>(n);
}

EsCaviarFit fit_es_caviar(std::span<const double> window, double level, EsRelation relation,
                          const EsCaviarOptions& opt) {
    const CaviarFit stage1 = fit_caviar_as(window, level, opt.caviar);

    std::vector<std::vector<double>> starts;
    for (const double g : {-2.0, std::log(0.2), -1.0, 0.0, 0.7})
        starts.push_back({stage1.betas[0], stage1.betas[1], stage1.betas[2], stage1.betas[3], g});
    Rng rng(mix_seed(opt.seed, 0xE5CA));
    for (int i = 0; i < opt.n_random; ++i)
        starts.push_back({stage1.betas[0], stage1.betas[1], stage1.betas[2], stage1.betas[3],
                          rng.uniform(-3.0, 1.0)});
    if (opt.warm)
        starts.push_back({opt.warm->betas[0], opt.warm->betas[1], opt.warm->betas[2],
                          opt.warm->betas[3], opt.warm->gamma0});

    const auto obj = [&window, level, relation](const std::vector<double>& x) {
        return es_caviar_objective({x[0], x[1], x[2], x[3]}, x[4], window, level, relation);
    };
    EsCaviarFit fit;
    fit.relation = relation;
    double best_val = kInf;
    for (const auto& s : starts) {
        const OptimizeResult res = nelder_mead(obj, s, opt.optimizer);
        if (res.value < best_val) {
            best_val = res.value;
            fit.betas = {res.x[0], res.x[1], res.x[2], res.x[3]};
            fit.gamma0 = res.x[4];
        }
    }
    if (!std::isfinite(best_val))
        throw std::runtime_error("fit_es_caviar: no start produced a finite joint score");

    const std::vector<double> path = caviar_path(fit.betas, window, level);
    fit.q_path.assign(path.begin(), path.end() - 1);
    fit.q_forecast = path.back();
    fit.es_forecast = es_from_var(relation, fit.q_forecast, fit.gamma0);
    fit.objective = best_val;
    return fit;
}

}  // namespace fcwq
