#include "fcwq/care.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "doctest.h"
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

TEST_SUITE_BEGIN("care");

TEST_CASE("expectile at one half is the mean") {
    const std::vector<double> x = {1.0, 2.0, 3.0, 6.0};
    CHECK(std::abs(expectile(x, 0.5) - 3.0) <= 1e-12);
}

TEST_CASE("two-point expectile solves the asymmetric normal equation") {
    // For {0,1} the weighted-mean fixed point gives exactly tau.
    const std::vector<double> x = {0.0, 1.0};
    CHECK(std::abs(expectile(x, 0.3) - 0.3) <= 1e-10);
    CHECK(std::abs(expectile(x, 0.05) - 0.05) <= 1e-10);
    CHECK(expectile(x, 0.1) < expectile(x, 0.5));
    CHECK(expectile(x, 0.5) < expectile(x, 0.9));
}

TEST_CASE("objective at tau one half is half the mean squared residual") {
    const auto w = sim_returns(21, 400);
    const std::array<double, 4> betas = {-0.02, 0.8, -0.05, -0.15};
    const auto mu = care_path(betas, w, 0.5);
    double ss = 0.0;
    for (std::size_t t = 0; t < w.size(); ++t) ss += (w[t] - mu[t]) * (w[t] - mu[t]);
    CHECK(std::abs(care_objective(betas, w, 0.5) - 0.5 * ss / w.size()) <= 1e-12);
}

TEST_CASE("constant model at tau one half is minimized at the sample mean") {
    const auto w = sim_returns(8, 300);
    // mu_1 is fixed by the start block, so only w[1..n-1] constrain b0.
    const double target =
        std::accumulate(w.begin() + 1, w.end(), 0.0) / static_cast<double>(w.size() - 1);
    const auto obj = [&w](const std::vector<double>& x) {
        return care_objective({x[0], 0.0, 0.0, 0.0}, w, 0.5);
    };
    const OptimizeResult res = nelder_mead(obj, {0.5}, {1e-12, 2000});
    CHECK(std::abs(res.x[0] - target) <= 1e-6);
}

TEST_CASE("path replays the recursion from the expectile start") {
    const std::array<double, 4> betas = {-0.03, 0.85, -0.04, -0.2};
    const auto w = sim_returns(2, 350);
    const double tau = 0.01;
    const auto mu = care_path(betas, w, tau);
    REQUIRE(mu.size() == w.size() + 1);
    CHECK(mu[0] == expectile(std::span<const double>(w.data(), 100), tau));
    for (std::size_t t = 1; t < mu.size(); ++t) {
        const double rp = w[t - 1];
        const double expect =
            betas[0] + betas[1] * mu[t - 1] + (rp >= 0.0 ? betas[2] : betas[3]) * std::abs(rp);
        CHECK(mu[t] == expect);
    }
}

TEST_CASE("level selection picks the violation rate closest to target") {
    const std::vector<double> exact = {0.002, 0.006, 0.01, 0.02};
    CHECK(select_tau(exact, 0.01) == 2);
    const std::vector<double> tie = {0.004, 0.016, 0.2};
    CHECK(select_tau(tie, 0.01) == 0);  // equal distance resolves downward
    const std::vector<double> skip = {0.0, 0.03};
    CHECK(select_tau(skip, 0.01) == 1);  // zero violations cannot be mapped
    CHECK_THROWS_AS(select_tau(std::vector<double>{0.0, 0.0}, 0.01), std::runtime_error);
}

TEST_CASE("fit tunes the expectile level to the target in sample") {
    const auto w = sim_returns(42, 1000);
    const double level = 0.025;
    CareOptions opt;
    opt.grid_size = 25;
    opt.n_candidates = 2000;
    opt.n_refine = 2;
    opt.optimizer = {1e-5, 200};
    const CareFit fit = fit_care_as(w, level, opt);
    CHECK(fit.tau_star > 0.0);
    CHECK(fit.tau_star <= level);
    CHECK(fit.vrate >= level / 2.0);
    CHECK(fit.vrate <= 2.0 * level);
    CHECK(fit.es_forecast < fit.var_forecast);
    CHECK(fit.var_forecast < 0.0);
    CHECK(fit.var_forecast == fit.mu_forecast);

    // Reported path, objective, and ES mapping all replay from the
    // returned parameters.
    const auto mu = care_path(fit.betas, w, fit.tau_star);
    REQUIRE(fit.mu_path.size() == w.size());
    for (std::size_t t = 0; t < w.size(); ++t) CHECK(fit.mu_path[t] == mu[t]);
    CHECK(fit.mu_forecast == mu.back());
    CHECK(std::abs(fit.objective - care_objective(fit.betas, w, fit.tau_star)) <= 1e-12);
    double tail = 0.0, mu_sum = 0.0;
    int hits = 0;
    for (std::size_t t = 0; t < w.size(); ++t) {
        mu_sum += mu[t];
        if (w[t] < mu[t]) {
            tail += w[t];
            ++hits;
        }
    }
    CHECK(std::abs(fit.vrate - static_cast<double>(hits) / w.size()) <= 1e-15);
    const double expect_es = (tail / hits) / (mu_sum / w.size()) * fit.mu_forecast;
    CHECK(std::abs(fit.es_forecast - expect_es) <= 1e-12);
}

TEST_CASE("fit is deterministic") {
    const auto w = sim_returns(6, 600);
    CareOptions opt;
    opt.grid_size = 10;
    opt.n_candidates = 1000;
    opt.n_refine = 2;
    const CareFit a = fit_care_as(w, 0.025, opt);
    const CareFit b = fit_care_as(w, 0.025, opt);
    CHECK(a.betas == b.betas);
    CHECK(a.tau_star == b.tau_star);
    CHECK(a.es_forecast == b.es_forecast);
}

TEST_CASE("warm start never raises the single-level objective") {
    const auto w = sim_returns(14, 700);
    CareOptions opt;
    opt.grid_size = 1;  // single tau, so start sets are nested exactly
    opt.n_candidates = 300;
    opt.n_refine = 2;
    const CareFit cold = fit_care_as(w, 0.025, opt);
    CareOptions warm_opt = opt;
    warm_opt.warm = &cold;
    const CareFit warm = fit_care_as(w, 0.025, warm_opt);
    CHECK(warm.objective <= cold.objective);
}

TEST_CASE("input guards") {
    const auto w = sim_returns(3, 300);
    CHECK_THROWS_AS(fit_care_as(std::span<const double>(w.data(), 200), 0.025, {}),
                    std::invalid_argument);
    CHECK_THROWS_AS(fit_care_as(w, 0.0, {}), std::invalid_argument);
    CareOptions bad;
    bad.grid_size = 0;
    CHECK_THROWS_AS(fit_care_as(w, 0.025, bad), std::invalid_argument);
    CHECK_THROWS_AS(expectile(std::vector<double>{}, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(expectile(std::vector<double>{1.0}, 1.5), std::invalid_argument);
}

TEST_SUITE_END();
