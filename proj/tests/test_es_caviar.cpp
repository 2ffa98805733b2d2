#include "fcwq/es_caviar.hpp"

#include <cmath>
#include <vector>

#include "doctest.h"
#include "fcwq/scoring.hpp"
#include "fcwq/simulate.hpp"

using namespace fcwq;

namespace {

std::vector<double> sim_returns(std::uint64_t seed, int t) {
    Dgp dgp;
    dgp.seed = seed;
    dgp.t = t;
    return simulate(dgp, {0.025}).series.returns;
}

}  // namespace

TEST_SUITE_BEGIN("es_caviar");

TEST_CASE("linked ES follows the stated relations") {
    CHECK(es_from_var(EsRelation::Additive, -2.0, 0.0) == -3.0);
    CHECK(std::abs(es_from_var(EsRelation::Multiplicative, -2.0, std::log(0.3)) - (-2.6)) <=
          1e-12);
    // A very negative gap parameter collapses the multiplicative link onto
    // the quantile itself.
    CHECK(std::abs(es_from_var(EsRelation::Multiplicative, -1.7, -40.0) - (-1.7)) <= 1e-12);
}

TEST_CASE("objective replays the joint score along the linked path") {
    const auto w = sim_returns(31, 400);
    const double level = 0.025;
    const std::array<double, 4> betas = {-0.04, 0.88, -0.06, -0.25};
    const double gamma0 = -0.5;
    for (const EsRelation rel : {EsRelation::Additive, EsRelation::Multiplicative}) {
        const auto q = caviar_path(betas, w, level);
        double acc = 0.0;
        for (std::size_t t = 0; t < w.size(); ++t)
            acc += al_joint_score(w[t], {q[t], es_from_var(rel, q[t], gamma0)}, level);
        CHECK(std::abs(es_caviar_objective(betas, gamma0, w, level, rel) - acc / w.size()) <=
              1e-12);
    }
}

TEST_CASE("objective is infinite when the linked ES is not negative") {
    const auto w = sim_returns(31, 400);
    const std::array<double, 4> positive_q = {1.0, 0.0, 0.0, 0.0};
    CHECK(std::isinf(es_caviar_objective(positive_q, 0.0, w, 0.025, EsRelation::Additive)));
    CHECK(std::isinf(
        es_caviar_objective(positive_q, 0.0, w, 0.025, EsRelation::Multiplicative)));
}

TEST_CASE("fit keeps ES below the quantile and replays its own path") {
    const auto w = sim_returns(17, 700);
    const double level = 0.025;
    EsCaviarOptions opt;
    opt.caviar.n_candidates = 2000;
    opt.caviar.n_refine = 5;
    for (const EsRelation rel : {EsRelation::Additive, EsRelation::Multiplicative}) {
        const EsCaviarFit fit = fit_es_caviar(w, level, rel, opt);
        CHECK(std::isfinite(fit.objective));
        CHECK(fit.q_forecast < 0.0);
        CHECK(fit.es_forecast < fit.q_forecast);
        const auto q = caviar_path(fit.betas, w, level);
        REQUIRE(fit.q_path.size() == w.size());
        for (std::size_t t = 0; t < w.size(); ++t) CHECK(fit.q_path[t] == q[t]);
        CHECK(fit.q_forecast == q.back());
        CHECK(fit.es_forecast == es_from_var(rel, fit.q_forecast, fit.gamma0));
        CHECK(std::abs(fit.objective -
                       es_caviar_objective(fit.betas, fit.gamma0, w, level, rel)) <= 1e-12);
    }
}

TEST_CASE("fit is deterministic") {
    const auto w = sim_returns(23, 600);
    EsCaviarOptions opt;
    opt.caviar.n_candidates = 1000;
    const EsCaviarFit a = fit_es_caviar(w, 0.025, EsRelation::Additive, opt);
    const EsCaviarFit b = fit_es_caviar(w, 0.025, EsRelation::Additive, opt);
    CHECK(a.betas == b.betas);
    CHECK(a.gamma0 == b.gamma0);
    CHECK(a.objective == b.objective);
}

TEST_CASE("joint fit beats the fixed-multiplier ES pair on most replications") {
    const double level = 0.025;
    const int reps = 50;
    int wins_add = 0, wins_mult = 0;
    for (int r = 0; r < reps; ++r) {
        Dgp dgp;
        dgp.seed = 3000 + r;
        dgp.t = 750;
        const auto w = simulate(dgp, {level}).series.returns;

        CaviarOptions copt;
        copt.n_candidates = 2000;
        copt.n_refine = 5;
        const CaviarFit cav = fit_caviar_as(w, level, copt);
        double naive = 0.0;
        for (std::size_t i = 0; i < w.size(); ++i) {
            REQUIRE(cav.q_path[i] < 0.0);
            naive += al_joint_score(w[i], {cav.q_path[i], 1.2 * cav.q_path[i]}, level);
        }
        naive /= static_cast<double>(w.size());

        EsCaviarOptions eopt;
        eopt.caviar = copt;
        if (fit_es_caviar(w, level, EsRelation::Additive, eopt).objective <= naive) ++wins_add;
        if (fit_es_caviar(w, level, EsRelation::Multiplicative, eopt).objective <= naive)
            ++wins_mult;
    }
    // Measured 43/50 and 50/50 with these seeds; the bound is the 60% rate
    // the design targets.
    CHECK(wins_add >= 30);
    CHECK(wins_mult >= 30);
}

TEST_SUITE_END();
