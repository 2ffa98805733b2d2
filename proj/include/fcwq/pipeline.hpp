#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fcwq/combiner.hpp"
#include "fcwq/config.hpp"
#include "fcwq/types.hpp"
#include "fcwq/universe.hpp"
#include "fcwq/wq_es.hpp"

namespace fcwq {

// fc-wq: combination regression + Beta-weighted shortfall.
// fc-sa: combination regression + simple average of the combined row.
// wq-single / sa-single: identity combination of one model's quantiles.
enum class Variant { FcWq, FcSa, WqSingle, SaSingle };

Variant parse_variant(const std::string& name);
std::string variant_name(Variant v);

struct PipelineConfig {
    QuantileGrid grid;
    WindowSpec window;
    std::vector<ModelKind> models;
    Variant variant = Variant::FcWq;
    std::uint64_t seed = 1;
    int reestimate_every = 1;
    UniverseOptions universe;
    int combiner_random_starts = 20;
    int wq_random_starts = 10;
    double optimizer_tol = 0.0;  // 0 keeps the per-stage defaults
    int optimizer_max_iter = 0;
};

// Reads the dotted keys grid.alpha, grid.alpha1, grid.m, window.n, window.h,
// universe.models, variant, seed, reestimate_every, pot.threshold_frac,
// care.grid_size, care.starts, care.refine, caviar.starts, caviar.refine,
// garch.starts, combiner.starts, wq.starts; unset keys take the defaults
// above. optimizer.tol and optimizer.max_iter override the combination and
// shortfall optimizers, optimizer.n_starts is the fallback when a stage
// start count is absent, and optimizer.seed is a strict alias for seed.
PipelineConfig pipeline_config(const Config& cfg);

// Panel cell provenance: in-sample estimate, fresh one-step forecast, or
// forecast carried forward after a model failure on that window.
enum PanelFlag : char { kFlagIs = 0, kFlagFc = 1, kFlagCf = 2 };
std::string panel_flag_name(char flag);

// Quantile universe over the full span: values[j][i][t] is model i's VaR at
// grid level j for date t; rows 0..N-1 are the first window's in-sample
// paths, rows N..N+H-1 are successive one-step forecasts.
struct PanelData {
    std::vector<std::vector<std::vector<double>>> values;
    std::vector<std::vector<std::vector<char>>> flags;
};

struct ForecastRecord {
    std::string date;
    double var = 0.0;  // combined quantile at the target level
    double es = 0.0;
    std::vector<double> combined;  // monotonized combined row, all levels
    bool es_crossed = false;       // es >= var; flagged, never corrected
    int carried_cells = 0;         // universe cells carried at this origin
};

// Step-1 coefficients per level and step-2 shortfall parameters at one
// re-estimation origin.
struct OriginEstimates {
    int h = 0;  // 1-based forecast origin
    std::string date;
    std::vector<CombinationWeights> weights;
    WqParams wq;
};

struct PipelineResult {
    PipelineConfig config;
    std::vector<std::string> dates;  // first N+H dates of the input
    std::vector<double> returns;
    PanelData panel;
    std::vector<ForecastRecord> records;
    std::vector<OriginEstimates> estimates;
};

// Rolling universe construction over H windows.
PanelData build_panel(const PipelineConfig& config, const ReturnSeries& series);

// Full run: build_panel plus per-origin combination and shortfall weighting.
PipelineResult run_pipeline(const PipelineConfig& config, const ReturnSeries& series);

// Combination and shortfall steps on a pre-built panel; with the panel loaded
// from a previous run's CSV this reproduces that run's records exactly.
PipelineResult run_with_panel(const PipelineConfig& config, const ReturnSeries& series,
                              PanelData panel);

// forecasts.csv, panel.csv, weights.csv, weights.json, combined.csv, es.csv,
// diagnostics.csv.
void write_outputs(const PipelineResult& result, const std::string& out_dir);

// Reads a panel.csv written by write_outputs back into config's level and
// model order; throws on unknown labels or missing cells.
PanelData load_panel(const std::string& path, const PipelineConfig& config);

}  // namespace fcwq
