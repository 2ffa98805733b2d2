#include "fcwq/garch.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fcwq/distributions.hpp"
#include "fcwq/rng.hpp"

namespace fcwq {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPi = 3.141592653589793238462643383279502884;

double mean_square(std::span<const double> r) {
    double acc = 0.0;
    for (double v : r) acc += v * v;
    return acc / static_cast<double>(r.size());
}

// nu-dependent additive constant of the standardized-t negative log-density.
double nll_const(double nu, int n) {
    const double logc = std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu) -
                        0.5 * std::log(nu * kPi);
    const double logs = 0.5 * std::log(nu / (nu - 2.0));
    return -static_cast<double>(n) * (logc + logs);
}

struct GjrParams {
    double omega, alpha1, a2, beta, nu;  // a2 = alpha1 + gamma >= 0
};

GjrParams unpack_gjr(const std::vector<double>& u) {
    return {std::exp(u[0]), std::exp(u[1]), std::exp(u[2]), 1.0 / (1.0 + std::exp(-u[3])),
            2.1 + std::exp(u[4])};
}

std::vector<double> pack_gjr(double omega, double alpha1, double gamma, double beta, double nu) {
    const double a2 = std::max(alpha1 + gamma, 1e-12);
    const double b = std::clamp(beta, 1e-8, 1.0 - 1e-8);
    return {std::log(std::max(omega, 1e-300)), std::log(std::max(alpha1, 1e-12)), std::log(a2),
            std::log(b / (1.0 - b)), std::log(std::max(nu - 2.1, 1e-8))};
}

struct EgarchParams {
    double omega, alpha1, gamma, beta, nu;
};

EgarchParams unpack_egarch(const std::vector<double>& u) {
    return {u[0], u[1], u[2], std::tanh(u[3]), 2.1 + std::exp(u[4])};
}

std::vector<double> pack_egarch(double omega, double alpha1, double gamma, double beta,
                                double nu) {
    const double b = std::clamp(beta, -1.0 + 1e-8, 1.0 - 1e-8);
    return {omega, alpha1, gamma, std::atanh(b), std::log(std::max(nu - 2.1, 1e-8))};
}

// Blocked products turn the per-observation logs of the likelihood into one
// log per 16 observations; magnitudes are bounded by the s2 guards.
struct BlockedLog {
    double acc = 0.0, prod = 1.0;
    int k = 0;
    void mul(double v) {
        prod *= v;
        if (++k == 16) {
            acc += std::log(prod);
            prod = 1.0;
            k = 0;
        }
    }
    double total() { return acc + std::log(prod); }
};

double gjr_nll(std::span<const double> r, const GjrParams& p, double s2_init) {
    const int n = static_cast<int>(r.size());
    const double inv = 1.0 / (p.nu - 2.0);
    double s2 = s2_init;
    BlockedLog ls2, lw;
    for (int t = 0; t < n; ++t) {
        if (t > 0) {
            const double rp = r[t - 1];
            s2 = p.omega + (rp < 0.0 ? p.a2 : p.alpha1) * rp * rp + p.beta * s2;
        }
        if (!(s2 >= 1e-12) || s2 > 1e12) return kInf;
        ls2.mul(s2);
        lw.mul(1.0 + r[t] * r[t] * inv / s2);
    }
    return nll_const(p.nu, n) + 0.5 * ls2.total() + 0.5 * (p.nu + 1.0) * lw.total();
}

// Smooth hinges keep the search away from the nonstationary region and from
// huge nu, where the lgamma difference in the t constant loses ~ulp(1e16)
// absolute accuracy and fabricates spurious minima. t(200) is already
// indistinguishable from Gaussian at these tail levels.
double nu_hinge(double nu, int n) {
    if (nu > 1000.0) return kInf;
    const double ex = std::max(0.0, nu - 200.0);
    return 10.0 * static_cast<double>(n) * ex * ex;
}

double persist_hinge(const GjrParams& p, int n) {
    const double persist = 0.5 * (p.alpha1 + p.a2) + p.beta;
    const double ex = std::max(0.0, persist - 0.9995);
    return 1e7 * static_cast<double>(n) * ex * ex;
}

double egarch_nll(std::span<const double> r, const EgarchParams& p, double s2_init) {
    const int n = static_cast<int>(r.size());
    const double inv = 1.0 / (p.nu - 2.0);
    const double eabs = t_abs_moment_std(p.nu);
    double ls2 = std::log(s2_init);
    double z_prev = 0.0;
    double acc_ls2 = 0.0;
    BlockedLog lw;
    for (int t = 0; t < n; ++t) {
        if (t > 0)
            ls2 = p.omega + p.beta * ls2 + p.alpha1 * (std::abs(z_prev) - eabs) + p.gamma * z_prev;
        if (!(ls2 > -27.0) || ls2 > 27.0) return kInf;
        const double s2 = std::exp(ls2);
        acc_ls2 += ls2;
        lw.mul(1.0 + r[t] * r[t] * inv / s2);
        z_prev = r[t] / std::sqrt(s2);
    }
    return nll_const(p.nu, n) + 0.5 * acc_ls2 + 0.5 * (p.nu + 1.0) * lw.total();
}

// Filters the full sigma path plus the one-step forecast from final params.
void gjr_filter(std::span<const double> r, const GjrParams& p, double s2_init,
                std::vector<double>& sigma, double& sigma_forecast) {
    const int n = static_cast<int>(r.size());
    sigma.resize(static_cast<std::size_t>(n));
    double s2 = s2_init;
    for (int t = 0; t < n; ++t) {
        if (t > 0) {
            const double rp = r[t - 1];
            s2 = p.omega + (rp < 0.0 ? p.a2 : p.alpha1) * rp * rp + p.beta * s2;
        }
        sigma[t] = std::sqrt(s2);
    }
    const double rn = r[n - 1];
    sigma_forecast = std::sqrt(p.omega + (rn < 0.0 ? p.a2 : p.alpha1) * rn * rn + p.beta * s2);
}

void egarch_filter(std::span<const double> r, const EgarchParams& p, double s2_init,
                   std::vector<double>& sigma, double& sigma_forecast) {
    const int n = static_cast<int>(r.size());
    const double eabs = t_abs_moment_std(p.nu);
    sigma.resize(static_cast<std::size_t>(n));
    double ls2 = std::log(s2_init);
    double z_prev = 0.0;
    for (int t = 0; t < n; ++t) {
        if (t > 0)
            ls2 = p.omega + p.beta * ls2 + p.alpha1 * (std::abs(z_prev) - eabs) + p.gamma * z_prev;
        sigma[t] = std::exp(0.5 * ls2);
        z_prev = r[t] / sigma[t];
    }
    sigma_forecast = std::exp(
        0.5 * (p.omega + p.beta * ls2 + p.alpha1 * (std::abs(z_prev) - eabs) + p.gamma * z_prev));
}

}  // namespace

double gjr_variance_step(double omega, double alpha1, double gamma, double beta, double r_prev,
                         double s2_prev) {
    return omega + (alpha1 + (r_prev < 0.0 ? gamma : 0.0)) * r_prev * r_prev + beta * s2_prev;
}

double egarch_logvar_step(double omega, double alpha1, double gamma, double beta, double z_prev,
                          double logs2_prev, double e_abs_z) {
    return omega + beta * logs2_prev + alpha1 * (std::abs(z_prev) - e_abs_z) + gamma * z_prev;
}

GarchFit fit_garch(std::span<const double> window, GarchKind kind, const GarchOptions& opt) {
    const int n = static_cast<int>(window.size());
    if (n < 250) throw std::invalid_argument("fit_garch: window shorter than 250 observations");
    const double s2_init = mean_square(window);
    if (!(s2_init > 0.0)) throw std::invalid_argument("fit_garch: degenerate window variance");

    std::vector<std::vector<double>> starts;
    Objective obj;
    if (kind == GarchKind::Gjr) {
        obj = [&window, s2_init, n](const std::vector<double>& u) {
            const GjrParams p = unpack_gjr(u);
            const double hinge = persist_hinge(p, n) + nu_hinge(p.nu, n);
            if (!std::isfinite(hinge)) return kInf;
            return gjr_nll(window, p, s2_init) + hinge;
        };
        starts.push_back(pack_gjr(0.06 * s2_init, 0.05, 0.10, 0.85, 8.0));
        starts.push_back(pack_gjr(0.02 * s2_init, 0.03, 0.02, 0.94, 6.0));
        starts.push_back(pack_gjr(0.30 * s2_init, 0.10, 0.10, 0.60, 12.0));
    } else {
        const double lv = std::log(s2_init);
        obj = [&window, s2_init, n](const std::vector<double>& u) {
            const EgarchParams p = unpack_egarch(u);
            const double hinge = nu_hinge(p.nu, n);
            if (!std::isfinite(hinge)) return kInf;
            return egarch_nll(window, p, s2_init) + hinge;
        };
        starts.push_back(pack_egarch(0.05 * lv, 0.10, -0.08, 0.95, 8.0));
        starts.push_back(pack_egarch(0.10 * lv, 0.15, -0.05, 0.90, 6.0));
        starts.push_back(pack_egarch(0.30 * lv, 0.20, 0.00, 0.70, 12.0));
    }
    if (opt.warm && opt.warm->kind == kind && opt.warm->nu > 2.0) {
        starts.push_back(kind == GarchKind::Gjr
                             ? pack_gjr(opt.warm->omega, opt.warm->alpha1, opt.warm->gamma,
                                        opt.warm->beta, opt.warm->nu)
                             : pack_egarch(opt.warm->omega, opt.warm->alpha1, opt.warm->gamma,
                                           opt.warm->beta, opt.warm->nu));
    }
    if (opt.n_random > 0) {
        const auto extra = multi_start_grid(starts[0], opt.n_random,
                                            {1.0, 0.7, 0.7, 1.5, 0.7}, mix_seed(opt.seed, 0xA6));
        starts.insert(starts.end(), extra.begin() + 1, extra.end());
    }

    const OptimizeResult res = minimize_smooth(obj, starts, opt.optimizer);

    GarchFit fit;
    fit.kind = kind;
    fit.converged = res.converged;
    if (kind == GarchKind::Gjr) {
        GjrParams p = unpack_gjr(res.x);
        double persist = 0.5 * (p.alpha1 + p.a2) + p.beta;
        if (persist >= 1.0) {  // safety valve; the hinge keeps this unreachable
            const double f = 0.9995 / persist;
            p.alpha1 *= f;
            p.a2 *= f;
            p.beta *= f;
        }
        fit.omega = p.omega;
        fit.alpha1 = p.alpha1;
        fit.gamma = p.a2 - p.alpha1;
        fit.beta = p.beta;
        fit.nu = p.nu;
        fit.nll = gjr_nll(window, p, s2_init);
        gjr_filter(window, p, s2_init, fit.sigma_path, fit.sigma_forecast);
    } else {
        const EgarchParams p = unpack_egarch(res.x);
        fit.omega = p.omega;
        fit.alpha1 = p.alpha1;
        fit.gamma = p.gamma;
        fit.beta = p.beta;
        fit.nu = p.nu;
        fit.nll = egarch_nll(window, p, s2_init);
        egarch_filter(window, p, s2_init, fit.sigma_path, fit.sigma_forecast);
    }
    if (!res.converged)
        throw GarchConvergenceError("fit_garch: likelihood search hit the iteration budget",
                                    std::move(fit));
    return fit;
}

std::vector<RiskForecast> parametric_var_es(const GarchFit& fit,
                                            const std::vector<double>& levels) {
    std::vector<RiskForecast> out;
    out.reserve(levels.size());
    for (double a : levels)
        out.push_back({fit.sigma_forecast * t_quantile_std(a, fit.nu),
                       fit.sigma_forecast * t_es_std(a, fit.nu)});
    return out;
}

std::vector<double> standardized_residuals(const GarchFit& fit, std::span<const double> window) {
    if (fit.sigma_path.size() != window.size())
        throw std::invalid_argument("standardized_residuals: window/path length mismatch");
    std::vector<double> z(window.size());
    for (std::size_t t = 0; t < window.size(); ++t) z[t] = window[t] / fit.sigma_path[t];
    return z;
}

}  // namespace fcwq
