#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "fcwq/distributions.hpp"
#include "fcwq/simulate.hpp"

using namespace fcwq;

TEST_SUITE_BEGIN("simulate");

TEST_CASE("iid-t violation rate matches the level") {
    Dgp dgp;
    dgp.kind = DgpKind::IidT;
    dgp.nu = 5.0;
    dgp.seed = 42;
    dgp.t = 100000;
    const SimulatedPath p = simulate(dgp, {0.025});
    REQUIRE(p.series.size() == dgp.t);
    const double q = t_quantile_std(0.025, 5.0);
    int hits = 0;
    for (int t = 0; t < dgp.t; ++t) {
        CHECK(p.true_var[0][t] == q);
        if (p.series.returns[t] < p.true_var[0][t]) ++hits;
    }
    CHECK(std::abs(hits / static_cast<double>(dgp.t) - 0.025) <= 0.002);
}

TEST_CASE("conditional coverage holds for the leveraged dgp") {
    Dgp dgp;
    dgp.seed = 9;
    dgp.t = 50000;
    const SimulatedPath p = simulate(dgp, {0.025});
    int hits = 0;
    for (int t = 0; t < dgp.t; ++t)
        if (p.series.returns[t] < p.true_var[0][t]) ++hits;
    CHECK(std::abs(hits / static_cast<double>(dgp.t) - 0.025) <= 0.002);
}

TEST_CASE("variance scale carries through returns and truth paths") {
    // Scaling omega by 4 scales every sigma_t by 2 under identical shocks.
    Dgp a;
    a.seed = 5;
    a.t = 400;
    Dgp b = a;
    b.omega = 4.0 * a.omega;
    const SimulatedPath pa = simulate(a, {0.005, 0.025});
    const SimulatedPath pb = simulate(b, {0.005, 0.025});
    for (int t = 0; t < a.t; ++t) {
        CHECK(pb.sigma[t] == doctest::Approx(2.0 * pa.sigma[t]).epsilon(1e-12));
        CHECK(pb.series.returns[t] == doctest::Approx(2.0 * pa.series.returns[t]).epsilon(1e-12));
        for (int j = 0; j < 2; ++j) {
            CHECK(pb.true_var[j][t] == doctest::Approx(2.0 * pa.true_var[j][t]).epsilon(1e-12));
            CHECK(pb.true_es[j][t] == doctest::Approx(2.0 * pa.true_es[j][t]).epsilon(1e-12));
        }
    }
}

TEST_CASE("seed determinism") {
    Dgp dgp;
    dgp.t = 200;
    const SimulatedPath a = simulate(dgp, {0.025});
    const SimulatedPath b = simulate(dgp, {0.025});
    CHECK(a.series.returns == b.series.returns);
    CHECK(a.series.dates == b.series.dates);
    CHECK(a.true_es == b.true_es);
    dgp.seed = 2;
    const SimulatedPath c = simulate(dgp, {0.025});
    CHECK(a.series.returns != c.series.returns);
}

TEST_CASE("truth ordering: es below var below zero") {
    for (DgpKind kind : {DgpKind::GjrT, DgpKind::EgarchT, DgpKind::IidT}) {
        Dgp dgp;
        dgp.kind = kind;
        if (kind == DgpKind::EgarchT) {
            dgp.omega = 0.0;
            dgp.alpha1 = 0.10;
            dgp.gamma = -0.08;
            dgp.beta = 0.95;
        }
        dgp.t = 300;
        const SimulatedPath p = simulate(dgp, {0.025});
        for (int t = 0; t < dgp.t; ++t) {
            CHECK(p.true_es[0][t] < p.true_var[0][t]);
            CHECK(p.true_var[0][t] < 0.0);
            CHECK(p.sigma[t] > 0.0);
            CHECK(std::isfinite(p.series.returns[t]));
        }
        validate_series(p.series);
    }
}

TEST_CASE("unconditional variance is near its stationary value") {
    // omega/(1 - alpha1 - gamma/2 - beta) = 1 for the default parameters; the
    // sample variance of a long path should sit near it (high persistence
    // keeps the tolerance loose).
    Dgp dgp;
    dgp.seed = 3;
    dgp.t = 200000;
    const SimulatedPath p = simulate(dgp, {});
    double acc = 0.0;
    for (double r : p.series.returns) acc += r * r;
    CHECK(std::abs(acc / dgp.t - 1.0) <= 0.2);
}

TEST_CASE("dates are strictly increasing weekdays from 2000") {
    Dgp dgp;
    dgp.t = 600;
    const SimulatedPath p = simulate(dgp, {});
    CHECK(p.series.dates.front() == "2000-01-03");
    for (int i = 1; i < dgp.t; ++i) CHECK(p.series.dates[i - 1] < p.series.dates[i]);
    // 2000-01-08 and 09 fall on a weekend.
    CHECK(p.series.dates[4] == "2000-01-07");
    CHECK(p.series.dates[5] == "2000-01-10");
}

TEST_CASE("invalid parameters are rejected") {
    Dgp dgp;
    dgp.nu = 2.0;
    CHECK_THROWS_AS(simulate(dgp, {}), std::invalid_argument);
    dgp = Dgp{};
    dgp.beta = 0.90;  // alpha1 + gamma/2 + beta = 1.0
    CHECK_THROWS_AS(simulate(dgp, {}), std::invalid_argument);
    dgp = Dgp{};
    dgp.omega = 0.0;
    CHECK_THROWS_AS(simulate(dgp, {}), std::invalid_argument);
    dgp = Dgp{};
    dgp.gamma = -0.10;
    CHECK_THROWS_AS(simulate(dgp, {}), std::invalid_argument);
    dgp = Dgp{};
    dgp.kind = DgpKind::EgarchT;
    dgp.beta = 1.0;
    CHECK_THROWS_AS(simulate(dgp, {}), std::invalid_argument);
    dgp = Dgp{};
    dgp.t = 0;
    CHECK_THROWS_AS(simulate(dgp, {}), std::invalid_argument);
}

TEST_CASE("dgp kind parsing") {
    CHECK(parse_dgp_kind("gjr-t") == DgpKind::GjrT);
    CHECK(parse_dgp_kind("egarch-t") == DgpKind::EgarchT);
    CHECK(parse_dgp_kind("iid-t") == DgpKind::IidT);
    CHECK_THROWS_AS(parse_dgp_kind("garch"), std::invalid_argument);
}

TEST_SUITE_END();
