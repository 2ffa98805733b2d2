#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "fcwq/distributions.hpp"
#include "fcwq/rng.hpp"
#include "fcwq/scoring.hpp"

using namespace fcwq;

TEST_SUITE_BEGIN("scoring");

TEST_CASE("quantile loss hand values") {
    CHECK(quantile_loss(-3.0, -2.0, 0.025) == doctest::Approx(0.975).epsilon(1e-12));
    CHECK(quantile_loss(1.0, -2.0, 0.025) == doctest::Approx(0.075).epsilon(1e-12));
    CHECK(quantile_loss(-2.0, -2.0, 0.025) == 0.0);
    CHECK_THROWS_AS(quantile_loss(std::nan(""), 0.0, 0.025), std::invalid_argument);
}

TEST_CASE("quantile loss nonnegative, zero only at r == q") {
    Rng rng(11);
    for (int i = 0; i < 2000; ++i) {
        const double r = rng.uniform(-5.0, 5.0);
        const double q = rng.uniform(-5.0, 5.0);
        const double alpha = rng.uniform(0.01, 0.99);
        const double loss = quantile_loss(r, q, alpha);
        CHECK(loss >= 0.0);
        if (r != q) CHECK(loss > 0.0);
    }
}

TEST_CASE("empirical quantile-loss minimum sits at the sample quantile") {
    // Dense grid over candidate q; the minimizing grid point must match the
    // order-statistic quantile up to one grid step.
    Rng rng(5);
    std::vector<double> sample(400);
    for (double& v : sample) v = sample_t_std(rng.uniform(), 6.0);
    const double alpha = 0.1;
    auto mean_ql = [&](double q) {
        double acc = 0.0;
        for (double r : sample) acc += quantile_loss(r, q, alpha);
        return acc / sample.size();
    };
    double best_q = -4.0, best_v = mean_ql(-4.0);
    for (double q = -4.0; q <= 1.0; q += 1e-3) {
        const double v = mean_ql(q);
        if (v < best_v) {
            best_v = v;
            best_q = q;
        }
    }
    std::vector<double> sorted = sample;
    std::sort(sorted.begin(), sorted.end());
    const double emp = sorted[static_cast<std::size_t>(std::ceil(alpha * sample.size())) - 1];
    CHECK(std::abs(best_q - emp) <= 2e-3);
    CHECK(mean_ql(emp) <= best_v + 1e-12);
}

TEST_CASE("joint score hand values") {
    CHECK(al_joint_score(-3.0, {-2.0, -4.0}, 0.025) ==
          doctest::Approx(11.16161216910418).epsilon(1e-12));
    CHECK(al_joint_score(1.0, {-2.0, -4.0}, 0.025) ==
          doctest::Approx(2.1616121691041805).epsilon(1e-12));
    CHECK_THROWS_AS(al_joint_score(0.0, {-2.0, 1.0}, 0.025), std::domain_error);
    CHECK_THROWS_AS(al_joint_score(0.0, {-2.0, 0.0}, 0.025), std::domain_error);
}

TEST_CASE("joint score ties count as non-violation") {
    // r == var hits the alpha branch, not the alpha-1 branch.
    const double at_tie = al_joint_score(-2.0, {-2.0, -4.0}, 0.025);
    const double just_above = al_joint_score(-2.0 + 1e-9, {-2.0, -4.0}, 0.025);
    CHECK(at_tie == doctest::Approx(just_above).epsilon(1e-6));
}

TEST_CASE("fz family with the paired choices differs from the joint score by -r/es") {
    const double alpha = 0.025;
    const FzFamily fam = fz_al_family(alpha);
    Rng rng(17);
    for (int i = 0; i < 500; ++i) {
        const double r = rng.uniform(-6.0, 6.0);
        const double q = rng.uniform(-5.0, -0.5);
        const double es = q - rng.uniform(0.1, 3.0);
        if (r == q) continue;
        const double d = al_joint_score(r, {q, es}, alpha) - fz_score(r, {q, es}, alpha, fam);
        CHECK(d == doctest::Approx(-r / es).epsilon(1e-12));
    }
    // The gap does not move with the VaR coordinate.
    const double d1 = al_joint_score(-3.0, {-2.0, -4.0}, alpha) -
                      fz_score(-3.0, {-2.0, -4.0}, alpha, fam);
    const double d2 = al_joint_score(-3.0, {-3.5, -4.0}, alpha) -
                      fz_score(-3.0, {-3.5, -4.0}, alpha, fam);
    CHECK(d1 == doctest::Approx(d2).epsilon(1e-12));
    // And it vanishes on average for zero-mean data, which is what makes the
    // two scores interchangeable for estimation.
    Rng rng2(18);
    double acc = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) acc += -sample_t_std(rng2.uniform(), 5.0) / -4.0;
    CHECK(std::abs(acc / n) <= 0.02);
}

TEST_CASE("fz score with g1 = 0 ignores the realization outside the indicator") {
    const FzFamily fam = fz_al_family(0.025);
    // Two realizations on the same side of q produce scores whose difference
    // comes only from the (q - r) term, linear in r.
    const RiskForecast f{-2.0, -4.0};
    const double s1 = fz_score(1.0, f, 0.025, fam);
    const double s2 = fz_score(2.0, f, 0.025, fam);
    const double s3 = fz_score(3.0, f, 0.025, fam);
    CHECK(s2 - s1 == doctest::Approx(s3 - s2).epsilon(1e-12));
}

TEST_CASE("fz score rejects invalid es domain") {
    const FzFamily fam = fz_al_family(0.025);
    CHECK_THROWS_AS(fz_score(0.0, {-2.0, 1.0}, 0.025, fam), std::domain_error);
}

TEST_CASE("identical forecasts produce identical scores") {
    const FzFamily fam = fz_al_family(0.025);
    CHECK(fz_score(-1.0, {-2.0, -3.0}, 0.025, fam) == fz_score(-1.0, {-2.0, -3.0}, 0.025, fam));
    CHECK(al_joint_score(-1.0, {-2.0, -3.0}, 0.025) == al_joint_score(-1.0, {-2.0, -3.0}, 0.025));
}

TEST_CASE("mean_score basics") {
    const std::vector<double> v{1.0, 2.0, 3.0};
    CHECK(mean_score(v) == doctest::Approx(2.0).epsilon(1e-15));
    const std::vector<double> one{5.5};
    CHECK(mean_score(one) == 5.5);
    CHECK_THROWS_AS(mean_score(std::vector<double>{}), std::invalid_argument);
}

TEST_CASE("joint score consistency on a known distribution") {
    // Mean score at the true (q, es) of an iid standardized-t sample should
    // not exceed the mean score at perturbed forecasts.
    const double alpha = 0.025, nu = 5.0;
    const double q = t_quantile_std(alpha, nu);
    const double es = t_es_std(alpha, nu);
    Rng rng(23);
    std::vector<double> r(20000);
    for (double& x : r) x = sample_t_std(rng.uniform(), nu);
    auto mean_al = [&](double qq, double ee) {
        double acc = 0.0;
        for (double x : r) acc += al_joint_score(x, {qq, ee}, alpha);
        return acc / r.size();
    };
    const double at_truth = mean_al(q, es);
    for (double mq : {0.9, 1.1})
        for (double me : {0.9, 1.1})
            CHECK(at_truth <= mean_al(q * mq, es * me) + 1e-12);
}

TEST_SUITE_END();
