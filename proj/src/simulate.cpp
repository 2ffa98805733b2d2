#include "fcwq/simulate.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "fcwq/distributions.hpp"
#include "fcwq/rng.hpp"

namespace fcwq {

namespace {

// Civil-date conversions (proleptic Gregorian, days since 1970-01-01).
long days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const long era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2u) / 5u + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<long>(doe) - 719468;
}

void civil_from_days(long z, int& y, unsigned& m, unsigned& d) {
    z += 719468;
    const long era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    y = static_cast<int>(yoe) + static_cast<int>(era) * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = doy - (153 * mp + 2) / 5 + 1;
    m = mp + (mp < 10 ? 3 : -9);
    y += m <= 2;
}

std::string iso_date(long z) {
    int y;
    unsigned m, d;
    civil_from_days(z, y, m, d);
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", y, m, d);
    return buf;
}

// 0 = Sunday ... 6 = Saturday.
int weekday(long z) { return static_cast<int>(((z % 7) + 11) % 7); }

std::vector<std::string> weekday_dates(int count) {
    std::vector<std::string> out;
    out.reserve(static_cast<std::size_t>(count));
    long z = days_from_civil(2000, 1, 3);
    for (int i = 0; i < count; ++i) {
        while (weekday(z) == 0 || weekday(z) == 6) ++z;
        out.push_back(iso_date(z));
        ++z;
    }
    return out;
}

void check_params(const Dgp& dgp) {
    if (dgp.t < 1) throw std::invalid_argument("simulate: t must be positive");
    if (!(dgp.nu > 2.0)) throw std::invalid_argument("simulate: nu must exceed 2");
    switch (dgp.kind) {
        case DgpKind::GjrT:
            if (!(dgp.omega > 0.0)) throw std::invalid_argument("simulate: omega must be positive");
            if (dgp.alpha1 < 0.0 || dgp.alpha1 + dgp.gamma < 0.0 || dgp.beta < 0.0)
                throw std::invalid_argument("simulate: negative variance coefficients");
            if (!(dgp.alpha1 + 0.5 * dgp.gamma + dgp.beta < 1.0))
                throw std::invalid_argument("simulate: nonstationary variance recursion");
            break;
        case DgpKind::EgarchT:
            if (!(std::abs(dgp.beta) < 1.0))
                throw std::invalid_argument("simulate: |beta| must be below 1");
            break;
        case DgpKind::IidT:
            break;
    }
}

}  // namespace

DgpKind parse_dgp_kind(const std::string& name) {
    if (name == "gjr-t") return DgpKind::GjrT;
    if (name == "egarch-t") return DgpKind::EgarchT;
    if (name == "iid-t") return DgpKind::IidT;
    throw std::invalid_argument("unknown dgp '" + name + "' (gjr-t, egarch-t, iid-t)");
}

SimulatedPath simulate(const Dgp& dgp, const std::vector<double>& levels) {
    check_params(dgp);
    constexpr int kBurn = 500;
    const int total = dgp.t + kBurn;

    Rng rng(mix_seed(dgp.seed, static_cast<std::uint64_t>(dgp.kind)));
    std::vector<double> z(static_cast<std::size_t>(total));
    for (double& v : z) v = sample_t_std(rng.uniform(), dgp.nu);

    std::vector<double> sigma(static_cast<std::size_t>(total));
    switch (dgp.kind) {
        case DgpKind::GjrT: {
            double s2 = dgp.omega / (1.0 - dgp.alpha1 - 0.5 * dgp.gamma - dgp.beta);
            double r_prev = 0.0;
            for (int t = 0; t < total; ++t) {
                if (t > 0)
                    s2 = dgp.omega +
                         (dgp.alpha1 + (r_prev < 0.0 ? dgp.gamma : 0.0)) * r_prev * r_prev +
                         dgp.beta * s2;
                sigma[t] = std::sqrt(s2);
                r_prev = sigma[t] * z[t];
            }
            break;
        }
        case DgpKind::EgarchT: {
            const double eabs = t_abs_moment_std(dgp.nu);
            double ls2 = dgp.omega / (1.0 - dgp.beta);
            for (int t = 0; t < total; ++t) {
                if (t > 0)
                    ls2 = dgp.omega + dgp.beta * ls2 + dgp.alpha1 * (std::abs(z[t - 1]) - eabs) +
                          dgp.gamma * z[t - 1];
                sigma[t] = std::exp(0.5 * ls2);
            }
            break;
        }
        case DgpKind::IidT:
            for (double& s : sigma) s = 1.0;
            break;
    }

    SimulatedPath out;
    out.series.dates = weekday_dates(dgp.t);
    out.series.returns.resize(static_cast<std::size_t>(dgp.t));
    out.sigma.resize(static_cast<std::size_t>(dgp.t));
    for (int t = 0; t < dgp.t; ++t) {
        out.sigma[t] = sigma[kBurn + t];
        out.series.returns[t] = sigma[kBurn + t] * z[kBurn + t];
    }
    out.levels = levels;
    out.true_var.resize(levels.size());
    out.true_es.resize(levels.size());
    for (std::size_t j = 0; j < levels.size(); ++j) {
        const double q = t_quantile_std(levels[j], dgp.nu);
        const double es = t_es_std(levels[j], dgp.nu);
        out.true_var[j].resize(static_cast<std::size_t>(dgp.t));
        out.true_es[j].resize(static_cast<std::size_t>(dgp.t));
        for (int t = 0; t < dgp.t; ++t) {
            out.true_var[j][t] = out.sigma[t] * q;
            out.true_es[j][t] = out.sigma[t] * es;
        }
    }
    validate_series(out.series);
    return out;
}

}  // namespace fcwq
