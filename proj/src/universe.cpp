#include "fcwq/universe.hpp"

#include <algorithm>
#include <cstddef>
#include <stdexcept>
#include <utility>

#include "fcwq/distributions.hpp"
#include "fcwq/rng.hpp"
#include "fcwq/tails.hpp"

namespace fcwq {
namespace {

bool uses_gjr(ModelKind k) {
    return k == ModelKind::Gjr || k == ModelKind::GjrPot || k == ModelKind::GjrFhs;
}

bool uses_egarch(ModelKind k) {
    return k == ModelKind::Egarch || k == ModelKind::EgarchPot || k == ModelKind::EgarchFhs;
}

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

}  // namespace

ModelKind parse_model(const std::string& name) {
    if (name == "gjr") return ModelKind::Gjr;
    if (name == "egarch") return ModelKind::Egarch;
    if (name == "gjr-pot") return ModelKind::GjrPot;
    if (name == "egarch-pot") return ModelKind::EgarchPot;
    if (name == "gjr-fhs") return ModelKind::GjrFhs;
    if (name == "egarch-fhs") return ModelKind::EgarchFhs;
    if (name == "caviar-as") return ModelKind::CaviarAs;
    if (name == "care-as") return ModelKind::CareAs;
    throw std::invalid_argument("unknown model: " + name);
}

std::string model_name(ModelKind kind) {
    switch (kind) {
        case ModelKind::Gjr: return "gjr";
        case ModelKind::Egarch: return "egarch";
        case ModelKind::GjrPot: return "gjr-pot";
        case ModelKind::EgarchPot: return "egarch-pot";
        case ModelKind::GjrFhs: return "gjr-fhs";
        case ModelKind::EgarchFhs: return "egarch-fhs";
        case ModelKind::CaviarAs: return "caviar-as";
        case ModelKind::CareAs: return "care-as";
    }
    throw std::logic_error("model_name: bad enum");
}

std::vector<ModelKind> parse_universe(const std::string& list) {
    std::vector<ModelKind> out;
    std::size_t pos = 0;
    while (pos <= list.size()) {
        std::size_t comma = list.find(',', pos);
        if (comma == std::string::npos) comma = list.size();
        std::string token = trim(list.substr(pos, comma - pos));
        if (token.empty()) throw std::invalid_argument("universe list: empty model name");
        ModelKind kind = parse_model(token);
        if (std::find(out.begin(), out.end(), kind) != out.end())
            throw std::invalid_argument("universe list: duplicate model " + token);
        out.push_back(kind);
        pos = comma + 1;
    }
    return out;
}

UniverseSlice forecast_universe(std::span<const double> window, const QuantileGrid& grid,
                                const std::vector<ModelKind>& models,
                                const UniverseOptions& opt, UniverseState& state,
                                std::uint64_t window_index, bool with_paths) {
    if (models.empty()) throw std::invalid_argument("universe: no models selected");
    const int m = grid.m();
    const std::size_t n_mod = models.size();
    const std::size_t n = window.size();

    if (state.caviar.size() != static_cast<std::size_t>(m)) state.caviar.assign(m, std::nullopt);
    if (state.care.size() != static_cast<std::size_t>(m)) state.care.assign(m, std::nullopt);
    if (state.last_forecast.size() != n_mod)
        state.last_forecast.assign(n_mod, std::vector<double>(m, 0.0));

    UniverseSlice slice;
    slice.forecast.assign(n_mod, std::vector<double>(m, 0.0));
    slice.carried.assign(n_mod, std::vector<char>(m, 0));
    if (with_paths)
        slice.path.assign(n_mod, std::vector<std::vector<double>>(m));

    // Shared likelihood fits; a failure here is deferred so dependent models
    // can fall back to their carried forecasts individually.
    std::optional<GarchFit> gjr_fit;
    std::optional<GarchFit> egarch_fit;
    std::string gjr_err;
    std::string egarch_err;
    auto fit_shared = [&](GarchKind kind, std::optional<GarchFit>& out,
                          std::optional<GarchFit>& warm, std::string& err, std::uint64_t tag) {
        GarchOptions gopt;
        gopt.seed = mix_seed(opt.seed, window_index, tag);
        gopt.n_random = opt.garch_random_starts;
        if (warm) gopt.warm = &*warm;
        try {
            out = fit_garch(window, kind, gopt);
            warm = out;
        } catch (const std::exception& e) {
            err = e.what();
        }
    };
    if (std::any_of(models.begin(), models.end(), uses_gjr))
        fit_shared(GarchKind::Gjr, gjr_fit, state.gjr, gjr_err, 1);
    if (std::any_of(models.begin(), models.end(), uses_egarch))
        fit_shared(GarchKind::Egarch, egarch_fit, state.egarch, egarch_err, 2);

    auto carry_level = [&](std::size_t i, int j, const std::string& why) {
        if (with_paths || !state.has_last)
            throw std::runtime_error(model_name(models[i]) + ": " + why);
        slice.forecast[i][j] = state.last_forecast[i][j];
        slice.carried[i][j] = 1;
    };
    auto carry_model = [&](std::size_t i, const std::string& why) {
        for (int j = 0; j < m; ++j) carry_level(i, j, why);
    };

    for (std::size_t i = 0; i < n_mod; ++i) {
        const ModelKind kind = models[i];
        switch (kind) {
            case ModelKind::Gjr:
            case ModelKind::Egarch: {
                const std::optional<GarchFit>& f = kind == ModelKind::Gjr ? gjr_fit : egarch_fit;
                if (!f) {
                    carry_model(i, kind == ModelKind::Gjr ? gjr_err : egarch_err);
                    break;
                }
                std::vector<RiskForecast> fc = parametric_var_es(*f, grid.levels);
                for (int j = 0; j < m; ++j) {
                    slice.forecast[i][j] = fc[j].var;
                    if (with_paths) {
                        double q = t_quantile_std(grid.levels[j], f->nu);
                        slice.path[i][j].resize(n);
                        for (std::size_t t = 0; t < n; ++t)
                            slice.path[i][j][t] = f->sigma_path[t] * q;
                    }
                }
                break;
            }
            case ModelKind::GjrPot:
            case ModelKind::EgarchPot:
            case ModelKind::GjrFhs:
            case ModelKind::EgarchFhs: {
                const bool on_gjr = uses_gjr(kind);
                const std::optional<GarchFit>& f = on_gjr ? gjr_fit : egarch_fit;
                if (!f) {
                    carry_model(i, on_gjr ? gjr_err : egarch_err);
                    break;
                }
                const bool pot = kind == ModelKind::GjrPot || kind == ModelKind::EgarchPot;
                TailFit tail;
                try {
                    tail = pot ? pot_tail(*f, window, grid.levels, opt.pot_threshold_frac)
                               : fhs_tail(*f, window, grid.levels);
                } catch (const std::exception& e) {
                    carry_model(i, e.what());
                    break;
                }
                std::vector<RiskForecast> fc = tail_var_es(*f, tail);
                for (int j = 0; j < m; ++j) {
                    slice.forecast[i][j] = fc[j].var;
                    if (with_paths) {
                        slice.path[i][j].resize(n);
                        for (std::size_t t = 0; t < n; ++t)
                            slice.path[i][j][t] = f->sigma_path[t] * tail.q[j];
                    }
                }
                break;
            }
            case ModelKind::CaviarAs: {
                for (int j = 0; j < m; ++j) {
                    CaviarOptions copt;
                    copt.seed = mix_seed(opt.seed, window_index, 7, j);
                    copt.n_candidates = opt.caviar_candidates;
                    copt.n_refine = opt.caviar_refine;
                    if (state.caviar[j]) copt.warm = &*state.caviar[j];
                    try {
                        CaviarFit f = fit_caviar_as(window, grid.levels[j], copt);
                        slice.forecast[i][j] = f.q_forecast;
                        if (with_paths) slice.path[i][j] = f.q_path;
                        state.caviar[j] = std::move(f);
                    } catch (const std::exception& e) {
                        carry_level(i, j, e.what());
                    }
                }
                break;
            }
            case ModelKind::CareAs: {
                for (int j = 0; j < m; ++j) {
                    CareOptions copt;
                    copt.seed = mix_seed(opt.seed, window_index, 8, j);
                    copt.grid_size = opt.care_grid_size;
                    copt.n_candidates = opt.care_candidates;
                    copt.n_refine = opt.care_refine;
                    if (state.care[j]) copt.warm = &*state.care[j];
                    try {
                        CareFit f = fit_care_as(window, grid.levels[j], copt);
                        slice.forecast[i][j] = f.var_forecast;
                        if (with_paths) slice.path[i][j] = f.mu_path;
                        state.care[j] = std::move(f);
                    } catch (const std::exception& e) {
                        carry_level(i, j, e.what());
                    }
                }
                break;
            }
        }
        // Carried cells keep last_forecast as is; fresh cells refresh it.
        for (int j = 0; j < m; ++j)
            if (!slice.carried[i][j]) state.last_forecast[i][j] = slice.forecast[i][j];
    }

    state.has_last = true;
    return slice;
}

}  // namespace fcwq
