#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fcwq/care.hpp"
#include "fcwq/caviar.hpp"
#include "fcwq/combiner.hpp"
#include "fcwq/garch.hpp"

namespace fcwq {

enum class ModelKind {
    Gjr,
    Egarch,
    GjrPot,
    EgarchPot,
    GjrFhs,
    EgarchFhs,
    CaviarAs,
    CareAs,
};

// "gjr", "egarch", "gjr-pot", "egarch-pot", "gjr-fhs", "egarch-fhs",
// "caviar-as", "care-as"
ModelKind parse_model(const std::string& name);
std::string model_name(ModelKind kind);

// Comma-separated model list; throws on unknown or duplicate names.
std::vector<ModelKind> parse_universe(const std::string& list);

struct UniverseOptions {
    std::uint64_t seed = 0;
    double pot_threshold_frac = 0.10;
    int care_grid_size = 100;
    int care_candidates = 10000;
    int care_refine = 10;
    int caviar_candidates = 10000;
    int caviar_refine = 10;
    int garch_random_starts = 2;
};

// One window's universe output. forecast[i][j] is model i's one-step VaR at
// grid level j; path[i][j] holds its N in-sample VaR estimates when
// with_paths was requested. carried[i][j] is 1 when the fit failed on this
// window and the previous window's forecast was reused.
struct UniverseSlice {
    std::vector<std::vector<double>> forecast;
    std::vector<std::vector<std::vector<double>>> path;
    std::vector<std::vector<char>> carried;
};

// Warm starts and last successful forecasts threaded through the rolling
// loop. Reuse one instance across consecutive windows of one series.
struct UniverseState {
    std::optional<GarchFit> gjr;
    std::optional<GarchFit> egarch;
    std::vector<std::optional<CaviarFit>> caviar;  // per grid level
    std::vector<std::optional<CareFit>> care;      // per grid level
    std::vector<std::vector<double>> last_forecast;
    bool has_last = false;
};

// Fits every selected model on one window. The GJR (EGARCH) likelihood fit is
// shared by its plain, POT and FHS variants; CAViaR and CARE refit per level.
// Random-start seeds mix (seed, window_index, model, level) so identical
// windows reproduce identical panels. A model failing on a window after a
// previous success carries that forecast forward with a flag; a failure with
// no history (first window) propagates the error.
UniverseSlice forecast_universe(std::span<const double> window, const QuantileGrid& grid,
                                const std::vector<ModelKind>& models,
                                const UniverseOptions& opt, UniverseState& state,
                                std::uint64_t window_index, bool with_paths);

}  // namespace fcwq
