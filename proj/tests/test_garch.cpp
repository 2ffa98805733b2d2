#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "fcwq/distributions.hpp"
#include "fcwq/garch.hpp"
#include "fcwq/simulate.hpp"

using namespace fcwq;

TEST_SUITE_BEGIN("garch");

TEST_CASE("gjr one-step variance recursion") {
    CHECK(gjr_variance_step(0.02, 0.05, 0.1, 0.9, -1.0, 1.0) ==
          doctest::Approx(1.07).epsilon(1e-14));
    CHECK(gjr_variance_step(0.02, 0.05, 0.1, 0.9, 1.0, 1.0) ==
          doctest::Approx(0.97).epsilon(1e-14));
}

TEST_CASE("egarch one-step log-variance recursion") {
    // omega + beta*ls2 + alpha1*(|z| - E|z|) + gamma*z
    CHECK(egarch_logvar_step(0.0, 0.1, -0.08, 0.95, -1.0, 0.0, 0.8) ==
          doctest::Approx(0.1).epsilon(1e-14));
    CHECK(egarch_logvar_step(0.01, 0.1, -0.08, 0.95, 2.0, -0.4, 0.8) ==
          doctest::Approx(0.01 - 0.38 + 0.12 - 0.16).epsilon(1e-12));
}

TEST_CASE("parametric var/es values") {
    GarchFit fit;
    fit.sigma_forecast = 1.0344;
    fit.nu = 10.0;
    auto fc = parametric_var_es(fit, {0.025});
    CHECK(fc[0].var == doctest::Approx(1.0344 * -1.9929079745398611).epsilon(1e-9));
    CHECK(fc[0].es == doctest::Approx(1.0344 * -2.5213880963650306).epsilon(1e-9));

    fit.sigma_forecast = 1.0;
    fc = parametric_var_es(fit, {0.025});
    CHECK(fc[0].var == doctest::Approx(-1.9929079745398611).epsilon(1e-12));

    fc = parametric_var_es(fit, {0.5});
    CHECK(fc[0].var == doctest::Approx(0.0).scale(1));
    CHECK(fc[0].es < 0.0);
}

TEST_CASE("parametric es sits below var at every level") {
    GarchFit fit;
    fit.sigma_forecast = 0.8;
    fit.nu = 6.3;
    const std::vector<double> levels{0.005, 0.010, 0.015, 0.020, 0.025};
    const auto fc = parametric_var_es(fit, levels);
    for (std::size_t j = 0; j < levels.size(); ++j) {
        CHECK(fc[j].es < fc[j].var);
        CHECK(fc[j].var < 0.0);
        if (j > 0) CHECK(fc[j].var > fc[j - 1].var);
    }
}

TEST_CASE("fitted recursion replays its stored path") {
    Dgp dgp;
    dgp.seed = 21;
    dgp.t = 1000;
    const SimulatedPath p = simulate(dgp, {});
    const auto& r = p.series.returns;
    double ms = 0.0;
    for (double v : r) ms += v * v;
    ms /= r.size();

    SUBCASE("gjr") {
        const GarchFit fit = fit_garch(r, GarchKind::Gjr, {});
        REQUIRE(fit.sigma_path.size() == r.size());
        double s2 = ms;
        for (std::size_t t = 0; t < r.size(); ++t) {
            if (t > 0) s2 = gjr_variance_step(fit.omega, fit.alpha1, fit.gamma, fit.beta,
                                              r[t - 1], s2);
            CHECK(fit.sigma_path[t] == doctest::Approx(std::sqrt(s2)).epsilon(1e-12));
        }
        const double s2f = gjr_variance_step(fit.omega, fit.alpha1, fit.gamma, fit.beta,
                                             r.back(), s2);
        CHECK(fit.sigma_forecast == doctest::Approx(std::sqrt(s2f)).epsilon(1e-12));
        CHECK(fit.converged);
        CHECK(fit.alpha1 + 0.5 * fit.gamma + fit.beta < 1.0);
        CHECK(fit.omega > 0.0);
        CHECK(fit.nu > 2.0);
    }

    SUBCASE("egarch") {
        const GarchFit fit = fit_garch(r, GarchKind::Egarch, {});
        const double eabs = t_abs_moment_std(fit.nu);
        double ls2 = std::log(ms);
        for (std::size_t t = 0; t < r.size(); ++t) {
            if (t > 0) {
                const double z = r[t - 1] / fit.sigma_path[t - 1];
                ls2 = egarch_logvar_step(fit.omega, fit.alpha1, fit.gamma, fit.beta, z, ls2,
                                         eabs);
            }
            CHECK(fit.sigma_path[t] == doctest::Approx(std::exp(0.5 * ls2)).epsilon(1e-12));
        }
        CHECK(std::abs(fit.beta) < 1.0);
        const double zn = r.back() / fit.sigma_path.back();
        const double ls2f =
            egarch_logvar_step(fit.omega, fit.alpha1, fit.gamma, fit.beta, zn, ls2, eabs);
        CHECK(fit.sigma_forecast == doctest::Approx(std::exp(0.5 * ls2f)).epsilon(1e-12));
    }
}

TEST_CASE("standardized residuals multiply back to the window") {
    Dgp dgp;
    dgp.seed = 4;
    dgp.t = 600;
    const SimulatedPath p = simulate(dgp, {});
    const GarchFit fit = fit_garch(p.series.returns, GarchKind::Gjr, {});
    const auto z = standardized_residuals(fit, p.series.returns);
    for (std::size_t t = 0; t < z.size(); ++t)
        CHECK(z[t] * fit.sigma_path[t] == doctest::Approx(p.series.returns[t]).epsilon(1e-12));
}

TEST_CASE("gjr recovery on simulated data") {
    // 100 replications at T=5000; each parameter's replication mean must sit
    // within 3 Monte-Carlo standard errors of the truth.
    const int reps = 100;
    const double truth[5] = {0.02, 0.05, 0.10, 0.88, 8.0};
    std::vector<std::vector<double>> est(5);
    for (int r = 0; r < reps; ++r) {
        Dgp dgp;
        dgp.seed = 1000 + static_cast<std::uint64_t>(r);
        dgp.t = 5000;
        const SimulatedPath p = simulate(dgp, {});
        GarchOptions opt;
        opt.seed = 77 + static_cast<std::uint64_t>(r);
        const GarchFit fit = fit_garch(p.series.returns, GarchKind::Gjr, opt);
        est[0].push_back(fit.omega);
        est[1].push_back(fit.alpha1);
        est[2].push_back(fit.gamma);
        est[3].push_back(fit.beta);
        est[4].push_back(fit.nu);
    }
    for (int k = 0; k < 5; ++k) {
        double mean = 0.0;
        for (double v : est[k]) mean += v;
        mean /= reps;
        double var = 0.0;
        for (double v : est[k]) var += (v - mean) * (v - mean);
        const double se = std::sqrt(var / (reps - 1)) / std::sqrt(static_cast<double>(reps));
        CHECK(std::abs(mean - truth[k]) <= 3.0 * se);
    }
}

TEST_CASE("egarch estimates land near the generating values") {
    const int reps = 40;
    const double truth[5] = {0.0, 0.10, -0.08, 0.95, 8.0};
    const double band[5] = {0.01, 0.02, 0.01, 0.01, 0.6};
    double mean[5] = {0, 0, 0, 0, 0};
    for (int r = 0; r < reps; ++r) {
        Dgp dgp;
        dgp.kind = DgpKind::EgarchT;
        dgp.omega = truth[0];
        dgp.alpha1 = truth[1];
        dgp.gamma = truth[2];
        dgp.beta = truth[3];
        dgp.nu = truth[4];
        dgp.seed = 2000 + static_cast<std::uint64_t>(r);
        dgp.t = 5000;
        const SimulatedPath p = simulate(dgp, {});
        GarchOptions opt;
        opt.seed = 7 + static_cast<std::uint64_t>(r);
        const GarchFit fit = fit_garch(p.series.returns, GarchKind::Egarch, opt);
        mean[0] += fit.omega;
        mean[1] += fit.alpha1;
        mean[2] += fit.gamma;
        mean[3] += fit.beta;
        mean[4] += fit.nu;
    }
    for (int k = 0; k < 5; ++k) CHECK(std::abs(mean[k] / reps - truth[k]) <= band[k]);
}

TEST_CASE("iteration budget exhaustion raises an error carrying the best fit") {
    Dgp dgp;
    dgp.seed = 13;
    dgp.t = 400;
    const SimulatedPath p = simulate(dgp, {});
    GarchOptions opt;
    opt.optimizer = {1e-8, 1};
    try {
        fit_garch(p.series.returns, GarchKind::Gjr, opt);
        FAIL("expected GarchConvergenceError");
    } catch (const GarchConvergenceError& e) {
        CHECK(std::isfinite(e.best.nll));
        CHECK(e.best.sigma_path.size() == p.series.returns.size());
        CHECK(!e.best.converged);
    }
}

TEST_CASE("window length guard") {
    std::vector<double> shortwin(249, 0.1);
    CHECK_THROWS_AS(fit_garch(shortwin, GarchKind::Gjr, {}), std::invalid_argument);
}

TEST_CASE("fit determinism") {
    Dgp dgp;
    dgp.seed = 6;
    dgp.t = 500;
    const SimulatedPath p = simulate(dgp, {});
    GarchOptions opt;
    opt.seed = 3;
    const GarchFit a = fit_garch(p.series.returns, GarchKind::Gjr, opt);
    const GarchFit b = fit_garch(p.series.returns, GarchKind::Gjr, opt);
    CHECK(a.omega == b.omega);
    CHECK(a.nu == b.nu);
    CHECK(a.sigma_forecast == b.sigma_forecast);
}

TEST_CASE("warm start never worsens the attained likelihood") {
    Dgp dgp;
    dgp.seed = 8;
    dgp.t = 700;
    const SimulatedPath pa = simulate(dgp, {});
    GarchOptions opt;
    opt.seed = 1;
    const GarchFit cold = fit_garch(pa.series.returns, GarchKind::Gjr, opt);
    GarchOptions warm = opt;
    warm.warm = &cold;
    const GarchFit again = fit_garch(pa.series.returns, GarchKind::Gjr, warm);
    CHECK(again.nll <= cold.nll + 1e-6);
}

TEST_SUITE_END();
