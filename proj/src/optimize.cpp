#include "fcwq/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "fcwq/rng.hpp"

namespace fcwq {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double guarded(const Objective& f, const std::vector<double>& x, long& evals) {
    ++evals;
    const double v = f(x);
    return std::isfinite(v) ? v : kInf;
}

}  // namespace

OptimizeResult nelder_mead(const Objective& f, const std::vector<double>& x0,
                           const OptimizeOptions& opt) {
    const int n = static_cast<int>(x0.size());
    if (n == 0) throw std::invalid_argument("nelder_mead: empty start");

    long evals = 0;
    std::vector<std::vector<double>> pts(n + 1, x0);
    for (int i = 0; i < n; ++i) {
        double step = 0.05 * std::abs(x0[i]);
        if (step == 0.0) step = 0.00025;
        pts[i + 1][i] += step;
    }
    std::vector<double> fv(n + 1);
    for (int i = 0; i <= n; ++i) fv[i] = guarded(f, pts[i], evals);

    std::vector<int> order(n + 1);
    std::iota(order.begin(), order.end(), 0);
    auto sort_simplex = [&] {
        std::stable_sort(order.begin(), order.end(),
                         [&fv](int a, int b) { return fv[a] < fv[b]; });
    };

    std::vector<double> centroid(n), xr(n), xe(n), xc(n);
    bool converged = false;
    for (int iter = 0; iter < opt.max_iter; ++iter) {
        sort_simplex();
        const int best = order[0], worst = order[n], second = order[n - 1];
        if (std::isfinite(fv[best]) && std::isfinite(fv[worst]) &&
            fv[worst] - fv[best] < opt.tol) {
            // Value spread alone is blind to a simplex straddling a kink or a
            // minimum symmetrically; require the simplex to have collapsed too.
            double xdiam = 0.0;
            for (int i = 1; i <= n; ++i)
                for (int j = 0; j < n; ++j)
                    xdiam = std::max(xdiam, std::abs(pts[order[i]][j] - pts[best][j]));
            if (xdiam < std::max(opt.tol, 1e-10)) {
                converged = true;
                break;
            }
        }
        for (int j = 0; j < n; ++j) {
            double s = 0.0;
            for (int i = 0; i < n; ++i) s += pts[order[i]][j];
            centroid[j] = s / n;
        }
        for (int j = 0; j < n; ++j) xr[j] = centroid[j] + (centroid[j] - pts[worst][j]);
        const double fr = guarded(f, xr, evals);

        if (fr < fv[best]) {
            for (int j = 0; j < n; ++j) xe[j] = centroid[j] + 2.0 * (centroid[j] - pts[worst][j]);
            const double fe = guarded(f, xe, evals);
            if (fe < fr) {
                pts[worst] = xe;
                fv[worst] = fe;
            } else {
                pts[worst] = xr;
                fv[worst] = fr;
            }
        } else if (fr < fv[second]) {
            pts[worst] = xr;
            fv[worst] = fr;
        } else if (fr < fv[worst]) {
            for (int j = 0; j < n; ++j) xc[j] = centroid[j] + 0.5 * (xr[j] - centroid[j]);
            const double fc = guarded(f, xc, evals);
            if (fc <= fr) {
                pts[worst] = xc;
                fv[worst] = fc;
            } else {
                for (int i = 1; i <= n; ++i) {
                    const int k = order[i];
                    for (int j = 0; j < n; ++j)
                        pts[k][j] = pts[best][j] + 0.5 * (pts[k][j] - pts[best][j]);
                    fv[k] = guarded(f, pts[k], evals);
                }
            }
        } else {
            for (int j = 0; j < n; ++j) xc[j] = centroid[j] - 0.5 * (centroid[j] - pts[worst][j]);
            const double fc = guarded(f, xc, evals);
            if (fc < fv[worst]) {
                pts[worst] = xc;
                fv[worst] = fc;
            } else {
                for (int i = 1; i <= n; ++i) {
                    const int k = order[i];
                    for (int j = 0; j < n; ++j)
                        pts[k][j] = pts[best][j] + 0.5 * (pts[k][j] - pts[best][j]);
                    fv[k] = guarded(f, pts[k], evals);
                }
            }
        }
    }
    sort_simplex();
    return OptimizeResult{pts[order[0]], fv[order[0]], converged, evals};
}

namespace {

std::vector<double> fd_gradient(const Objective& f, const std::vector<double>& x, double fx,
                                long& evals) {
    const int n = static_cast<int>(x.size());
    std::vector<double> g(n);
    std::vector<double> xp = x;
    for (int i = 0; i < n; ++i) {
        const double h = std::max(1e-6, 1e-8 * std::abs(x[i]));
        xp[i] = x[i] + h;
        const double fp = guarded(f, xp, evals);
        xp[i] = x[i] - h;
        const double fm = guarded(f, xp, evals);
        xp[i] = x[i];
        if (std::isfinite(fp) && std::isfinite(fm)) {
            g[i] = (fp - fm) / (2.0 * h);
        } else if (std::isfinite(fp)) {
            g[i] = (fp - fx) / h;  // one-sided fallback at a domain edge
        } else if (std::isfinite(fm)) {
            g[i] = (fx - fm) / h;
        } else {
            throw std::runtime_error("bfgs: objective non-finite at both gradient probes");
        }
    }
    return g;
}

}  // namespace

OptimizeResult bfgs(const Objective& f, const std::vector<double>& x0,
                    const OptimizeOptions& opt) {
    const int n = static_cast<int>(x0.size());
    if (n == 0) throw std::invalid_argument("bfgs: empty start");

    long evals = 0;
    std::vector<double> x = x0;
    double fx = guarded(f, x, evals);
    if (!std::isfinite(fx)) throw std::runtime_error("bfgs: objective non-finite at start");

    // Inverse Hessian approximation, row-major, initialized to identity.
    std::vector<double> hinv(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) hinv[static_cast<std::size_t>(i) * n + i] = 1.0;

    std::vector<double> g = fd_gradient(f, x, fx, evals);
    std::vector<double> p(n), xt(n), gnew(n), s(n), y(n), hy(n);
    std::vector<double> best_x = x;
    double best_f = fx;
    bool converged = false;
    int stall = 0;

    for (int iter = 0; iter < opt.max_iter; ++iter) {
        double gmax = 0.0;
        for (double gi : g) gmax = std::max(gmax, std::abs(gi));
        if (gmax < opt.tol) {
            converged = true;
            break;
        }

        for (int i = 0; i < n; ++i) {
            double acc = 0.0;
            for (int j = 0; j < n; ++j) acc += hinv[static_cast<std::size_t>(i) * n + j] * g[j];
            p[i] = -acc;
        }
        double slope = 0.0;
        for (int i = 0; i < n; ++i) slope += g[i] * p[i];
        if (!(slope < 0.0)) {  // curvature corruption: reset to steepest descent
            for (int i = 0; i < n; ++i) {
                for (int j = 0; j < n; ++j)
                    hinv[static_cast<std::size_t>(i) * n + j] = (i == j) ? 1.0 : 0.0;
                p[i] = -g[i];
            }
            slope = 0.0;
            for (int i = 0; i < n; ++i) slope -= g[i] * g[i];
            if (slope == 0.0) {
                converged = true;
                break;
            }
        }

        // The absolute slack absorbs finite-difference noise on large-magnitude
        // objectives; without it a warm start sitting at the optimum would fail
        // the line search outright.
        const double slack = 1e-12 * (1.0 + std::abs(fx));
        double step = 1.0;
        double ft = kInf;
        bool accepted = false;
        for (int bt = 0; bt < 60; ++bt) {
            for (int i = 0; i < n; ++i) xt[i] = x[i] + step * p[i];
            ft = guarded(f, xt, evals);
            if (ft <= fx + 1e-4 * step * slope + slack) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) {  // no decrease at any scale: numerically stationary
            converged = true;
            break;
        }

        for (int i = 0; i < n; ++i) s[i] = xt[i] - x[i];
        const double fprev = fx;
        x = xt;
        fx = ft;
        if (fx < best_f) {
            best_f = fx;
            best_x = x;
        }
        gnew = fd_gradient(f, x, fx, evals);
        for (int i = 0; i < n; ++i) y[i] = gnew[i] - g[i];
        g = gnew;

        double ys = 0.0, ynorm = 0.0, snorm = 0.0;
        for (int i = 0; i < n; ++i) {
            ys += y[i] * s[i];
            ynorm += y[i] * y[i];
            snorm += s[i] * s[i];
        }
        if (ys > 1e-12 * std::sqrt(ynorm * snorm)) {
            const double rho = 1.0 / ys;
            for (int i = 0; i < n; ++i) {
                double acc = 0.0;
                for (int j = 0; j < n; ++j) acc += hinv[static_cast<std::size_t>(i) * n + j] * y[j];
                hy[i] = acc;
            }
            double yhy = 0.0;
            for (int i = 0; i < n; ++i) yhy += y[i] * hy[i];
            for (int i = 0; i < n; ++i) {
                for (int j = 0; j < n; ++j) {
                    hinv[static_cast<std::size_t>(i) * n + j] +=
                        (1.0 + rho * yhy) * rho * s[i] * s[j] - rho * (hy[i] * s[j] + s[i] * hy[j]);
                }
            }
        }

        // Repeated flat progress means finite differences are at noise level;
        // the threshold sits above the line-search slack so noise steps cannot
        // keep resetting the counter.
        if (std::abs(fprev - fx) <= 1e-11 * (1.0 + std::abs(fx))) {
            if (++stall >= 3) {
                converged = true;
                break;
            }
        } else {
            stall = 0;
        }
    }
    if (!converged) {
        double gmax = 0.0;
        for (double gi : g) gmax = std::max(gmax, std::abs(gi));
        if (gmax < opt.tol) converged = true;
    }
    return OptimizeResult{best_x, best_f, converged, evals};
}

namespace {

OptimizeResult multi_start(const Objective& f, const std::vector<std::vector<double>>& starts,
                           const OptimizeOptions& opt, bool smooth) {
    if (starts.empty()) throw std::invalid_argument("multi-start: no starts supplied");
    OptimizeResult best;
    bool have = false;
    long total_evals = 0;
    int discarded = 0;
    for (const auto& start : starts) {
        ++total_evals;
        const double v0 = f(start);
        if (!std::isfinite(v0)) {
            ++discarded;
            continue;
        }
        OptimizeResult r;
        if (smooth) {
            try {
                r = bfgs(f, start, opt);
            } catch (const std::runtime_error&) {
                ++discarded;
                continue;
            }
        } else {
            r = nelder_mead(f, start, opt);
        }
        total_evals += r.evaluations;
        if (!have || r.value < best.value) {
            best = r;
            have = true;
        }
    }
    if (!have)
        throw std::invalid_argument("multi-start: all " + std::to_string(discarded) +
                                    " starts invalid");
    best.evaluations = total_evals;
    return best;
}

}  // namespace

OptimizeResult minimize_nonsmooth(const Objective& f,
                                  const std::vector<std::vector<double>>& starts,
                                  const OptimizeOptions& opt) {
    return multi_start(f, starts, opt, false);
}

OptimizeResult minimize_smooth(const Objective& f, const std::vector<std::vector<double>>& starts,
                               const OptimizeOptions& opt) {
    return multi_start(f, starts, opt, true);
}

std::vector<std::vector<double>> multi_start_grid(const std::vector<double>& center, int n_random,
                                                  const std::vector<double>& scale,
                                                  std::uint64_t seed) {
    if (n_random < 0) throw std::invalid_argument("multi_start_grid: n_random must be >= 0");
    if (scale.size() != center.size())
        throw std::invalid_argument("multi_start_grid: scale/center size mismatch");
    std::vector<std::vector<double>> starts;
    starts.reserve(static_cast<std::size_t>(n_random) + 1);
    starts.push_back(center);
    Rng rng(mix_seed(seed));
    for (int k = 0; k < n_random; ++k) {
        std::vector<double> x(center.size());
        for (std::size_t i = 0; i < center.size(); ++i)
            x[i] = center[i] + scale[i] * rng.uniform(-1.0, 1.0);
        starts.push_back(std::move(x));
    }
    return starts;
}

}  // namespace fcwq
