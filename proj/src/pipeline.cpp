#include "fcwq/pipeline.hpp"

#include <algorithm>
#include <cstddef>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <stdexcept>
#include <utility>

#include "json.hpp"

#include "fcwq/csv.hpp"
#include "fcwq/data.hpp"
#include "fcwq/rng.hpp"

namespace fcwq {
namespace {

std::string level_label(double level) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", level);
    return buf;
}

std::string origin_context(int h, const std::string& stage) {
    return "origin " + std::to_string(h) + ", stage " + stage + ": ";
}

void check_panel_shape(const PanelData& panel, int m, std::size_t n_mod, std::size_t t) {
    if (panel.values.size() != static_cast<std::size_t>(m) || panel.flags.size() != panel.values.size())
        throw std::invalid_argument("panel: level count mismatch");
    for (int j = 0; j < m; ++j) {
        if (panel.values[j].size() != n_mod || panel.flags[j].size() != n_mod)
            throw std::invalid_argument("panel: model count mismatch");
        for (std::size_t i = 0; i < n_mod; ++i)
            if (panel.values[j][i].size() != t || panel.flags[j][i].size() != t)
                throw std::invalid_argument("panel: row count mismatch");
    }
}

}  // namespace

Variant parse_variant(const std::string& name) {
    if (name == "fc-wq") return Variant::FcWq;
    if (name == "fc-sa") return Variant::FcSa;
    if (name == "wq-single") return Variant::WqSingle;
    if (name == "sa-single") return Variant::SaSingle;
    throw std::invalid_argument("unknown variant: " + name);
}

std::string variant_name(Variant v) {
    switch (v) {
        case Variant::FcWq: return "fc-wq";
        case Variant::FcSa: return "fc-sa";
        case Variant::WqSingle: return "wq-single";
        case Variant::SaSingle: return "sa-single";
    }
    throw std::logic_error("variant_name: bad enum");
}

std::string panel_flag_name(char flag) {
    switch (flag) {
        case kFlagIs: return "IS";
        case kFlagFc: return "FC";
        case kFlagCf: return "CF";
    }
    throw std::logic_error("panel_flag_name: bad flag");
}

PipelineConfig pipeline_config(const Config& cfg) {
    PipelineConfig out;
    out.grid = make_grid(cfg.get_double("grid.alpha", 0.025), cfg.get_double("grid.alpha1", 0.005),
                         cfg.get_int("grid.m", 3));
    out.window.n = cfg.get_int("window.n", 1000);
    out.window.h = cfg.get_int("window.h", 500);
    out.models = parse_universe(cfg.get_string(
        "universe.models", "gjr,egarch,gjr-pot,egarch-pot,gjr-fhs,egarch-fhs,caviar-as,care-as"));
    out.variant = parse_variant(cfg.get_string("variant", "fc-wq"));
    out.seed = cfg.get_u64("seed", 1);
    out.reestimate_every = cfg.get_int("reestimate_every", 1);
    out.universe.pot_threshold_frac = cfg.get_double("pot.threshold_frac", 0.10);
    out.universe.care_grid_size = cfg.get_int("care.grid_size", 100);
    out.universe.care_candidates = cfg.get_int("care.starts", 10000);
    out.universe.care_refine = cfg.get_int("care.refine", 10);
    out.universe.caviar_candidates = cfg.get_int("caviar.starts", 10000);
    out.universe.caviar_refine = cfg.get_int("caviar.refine", 10);
    out.universe.garch_random_starts = cfg.get_int("garch.starts", 2);
    const int shared_starts = cfg.get_int("optimizer.n_starts", 0);
    out.combiner_random_starts = cfg.get_int("combiner.starts", shared_starts > 0 ? shared_starts : 20);
    out.wq_random_starts = cfg.get_int("wq.starts", shared_starts > 0 ? shared_starts : 10);
    out.optimizer_tol = cfg.get_double("optimizer.tol", 0.0);
    out.optimizer_max_iter = cfg.get_int("optimizer.max_iter", 0);
    if (cfg.has("optimizer.seed")) {
        if (cfg.has("seed"))
            throw std::invalid_argument("pipeline config: seed and optimizer.seed both set");
        out.seed = cfg.get_u64("optimizer.seed", 1);
    }
    return out;
}

namespace {

void check_config(const PipelineConfig& config, const ReturnSeries& series) {
    validate_series(series);
    if (config.grid.m() < 2) throw std::invalid_argument("pipeline: grid needs at least 2 levels");
    if (config.models.empty()) throw std::invalid_argument("pipeline: empty universe");
    if (config.window.n < 1 || config.window.h < 0)
        throw std::invalid_argument("pipeline: bad window spec");
    if (series.size() < config.window.n + config.window.h)
        throw std::invalid_argument("pipeline: series shorter than N+H");
    if (config.reestimate_every < 1)
        throw std::invalid_argument("pipeline: reestimate_every must be >= 1");
    if ((config.variant == Variant::WqSingle || config.variant == Variant::SaSingle) &&
        config.models.size() != 1)
        throw std::invalid_argument("pipeline: single-model variant requires exactly one model");
}

}  // namespace

PanelData build_panel(const PipelineConfig& config, const ReturnSeries& series) {
    check_config(config, series);
    const int n = config.window.n;
    const int h_total = config.window.h;
    const int m = config.grid.m();
    const std::size_t n_mod = config.models.size();
    const std::size_t t_total = static_cast<std::size_t>(h_total > 0 ? n + h_total : 0);

    PanelData panel;
    panel.values.assign(m, std::vector<std::vector<double>>(n_mod, std::vector<double>(t_total)));
    panel.flags.assign(m, std::vector<std::vector<char>>(n_mod, std::vector<char>(t_total, kFlagIs)));
    if (h_total == 0) return panel;

    UniverseOptions uopt = config.universe;
    uopt.seed = config.seed;
    UniverseState state;
    const std::vector<std::span<const double>> windows = rolling_windows(series, config.window);
    for (int h_idx = 0; h_idx < h_total; ++h_idx) {
        UniverseSlice slice;
        try {
            slice = forecast_universe(windows[h_idx], config.grid, config.models, uopt, state,
                                      static_cast<std::uint64_t>(h_idx), h_idx == 0);
        } catch (const std::exception& e) {
            throw std::runtime_error(origin_context(h_idx + 1, "universe") + e.what());
        }
        for (int j = 0; j < m; ++j) {
            for (std::size_t i = 0; i < n_mod; ++i) {
                if (h_idx == 0)
                    for (int t = 0; t < n; ++t) panel.values[j][i][t] = slice.path[i][j][t];
                panel.values[j][i][n + h_idx] = slice.forecast[i][j];
                panel.flags[j][i][n + h_idx] = slice.carried[i][j] ? kFlagCf : kFlagFc;
            }
        }
    }
    return panel;
}

PipelineResult run_with_panel(const PipelineConfig& config, const ReturnSeries& series,
                              PanelData panel) {
    check_config(config, series);
    const int n = config.window.n;
    const int h_total = config.window.h;
    const int m = config.grid.m();
    const double alpha = config.grid.alpha();
    const std::size_t n_mod = config.models.size();
    const std::size_t t_total = static_cast<std::size_t>(h_total > 0 ? n + h_total : 0);
    check_panel_shape(panel, m, n_mod, t_total);

    PipelineResult result;
    result.config = config;
    result.panel = std::move(panel);
    if (h_total > 0) {
        result.dates.assign(series.dates.begin(), series.dates.begin() + (n + h_total));
        result.returns.assign(series.returns.begin(), series.returns.begin() + (n + h_total));
    }
    if (h_total == 0) return result;

    const bool regression = config.variant == Variant::FcWq || config.variant == Variant::FcSa;
    const bool shortfall_fit = config.variant == Variant::FcWq || config.variant == Variant::WqSingle;

    std::vector<CombinationWeights> weights(m);
    if (!regression)
        for (int j = 0; j < m; ++j) weights[j].c = {0.0, 1.0};
    bool have_weights = !regression;
    WqParams wq;
    bool have_wq = false;

    std::vector<std::vector<double>> cols(m, std::vector<double>(n));
    std::vector<double> row(m);
    std::vector<double> model_row(n_mod);
    const std::span<const double> all_returns(result.returns);

    for (int h_idx = 0; h_idx < h_total; ++h_idx) {
        const int origin = h_idx + 1;
        const std::span<const double> window_returns = all_returns.subspan(h_idx, n);
        if (h_idx % config.reestimate_every == 0) {
            if (regression) {
                for (int j = 0; j < m; ++j) {
                    std::vector<std::span<const double>> paths(n_mod);
                    for (std::size_t i = 0; i < n_mod; ++i)
                        paths[i] = std::span<const double>(result.panel.values[j][i])
                                       .subspan(h_idx, n);
                    CombinerOptions copt;
                    copt.seed = mix_seed(config.seed, 0xC0DE, h_idx, j);
                    copt.n_random = config.combiner_random_starts;
                    if (config.optimizer_tol > 0.0) copt.optimizer.tol = config.optimizer_tol;
                    if (config.optimizer_max_iter > 0)
                        copt.optimizer.max_iter = config.optimizer_max_iter;
                    if (have_weights) copt.warm = &weights[j];
                    try {
                        weights[j] = estimate_combination_weights(paths, window_returns,
                                                                  config.grid.levels[j], copt);
                    } catch (const std::exception& e) {
                        throw std::runtime_error(
                            origin_context(origin, "combination at level " +
                                                       level_label(config.grid.levels[j])) +
                            e.what());
                    }
                }
                have_weights = true;
            }
            if (shortfall_fit) {
                for (int t = 0; t < n; ++t) {
                    for (int j = 0; j < m; ++j) {
                        for (std::size_t i = 0; i < n_mod; ++i)
                            model_row[i] = result.panel.values[j][i][h_idx + t];
                        row[j] = combine(model_row, weights[j]);
                    }
                    std::sort(row.begin(), row.end());
                    for (int j = 0; j < m; ++j) cols[j][t] = row[j];
                }
                std::vector<std::span<const double>> col_spans(cols.begin(), cols.end());
                WqOptions wopt;
                wopt.seed = mix_seed(config.seed, 0xE5F0, h_idx);
                wopt.n_random = config.wq_random_starts;
                if (config.optimizer_tol > 0.0) wopt.optimizer.tol = config.optimizer_tol;
                if (config.optimizer_max_iter > 0)
                    wopt.optimizer.max_iter = config.optimizer_max_iter;
                if (have_wq) wopt.warm = &wq;
                try {
                    wq = estimate_wq_params(col_spans, window_returns, alpha, wopt);
                } catch (const std::exception& e) {
                    throw std::runtime_error(origin_context(origin, "shortfall weighting") +
                                             e.what());
                }
                have_wq = true;
            }
            result.estimates.push_back({origin, result.dates[n + h_idx], weights, wq});
        }

        for (int j = 0; j < m; ++j) {
            for (std::size_t i = 0; i < n_mod; ++i)
                model_row[i] = result.panel.values[j][i][n + h_idx];
            row[j] = combine(model_row, weights[j]);
        }
        ForecastRecord rec;
        rec.date = result.dates[n + h_idx];
        rec.combined = monotonize(row);
        rec.var = rec.combined[m - 1];
        rec.es = shortfall_fit
                     ? es_from_weights(rec.combined, wq.w0, beta_weights(wq.a, wq.b, m))
                     : simple_average_es(rec.combined);
        rec.es_crossed = rec.es >= rec.var;
        for (int j = 0; j < m; ++j)
            for (std::size_t i = 0; i < n_mod; ++i)
                if (result.panel.flags[j][i][n + h_idx] == kFlagCf) ++rec.carried_cells;
        result.records.push_back(std::move(rec));
    }
    return result;
}

PipelineResult run_pipeline(const PipelineConfig& config, const ReturnSeries& series) {
    return run_with_panel(config, series, build_panel(config, series));
}

void write_outputs(const PipelineResult& result, const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    const PipelineConfig& config = result.config;
    const int n = config.window.n;
    const int m = config.grid.m();
    const std::size_t n_mod = config.models.size();

    std::vector<std::string> header = {"date", "var", "es"};
    for (int j = 0; j < m; ++j) header.push_back("q_" + level_label(config.grid.levels[j]));
    header.push_back("es_crossed");
    header.push_back("carried_cells");
    std::vector<std::vector<std::string>> rows;
    for (const ForecastRecord& rec : result.records) {
        std::vector<std::string> row = {rec.date, format_double(rec.var), format_double(rec.es)};
        for (double q : rec.combined) row.push_back(format_double(q));
        row.push_back(rec.es_crossed ? "1" : "0");
        row.push_back(std::to_string(rec.carried_cells));
        rows.push_back(std::move(row));
    }
    write_csv(out_dir + "/forecasts.csv", header, rows);

    rows.clear();
    const std::size_t t_total = result.dates.size();
    for (std::size_t t = 0; t < t_total; ++t)
        for (int j = 0; j < m; ++j)
            for (std::size_t i = 0; i < n_mod; ++i)
                rows.push_back({result.dates[t], level_label(config.grid.levels[j]),
                                model_name(config.models[i]),
                                format_double(result.panel.values[j][i][t]),
                                panel_flag_name(result.panel.flags[j][i][t])});
    write_csv(out_dir + "/panel.csv", {"date", "level", "model", "value", "flag"}, rows);

    header = {"date", "level"};
    for (std::size_t i = 0; i <= n_mod; ++i) header.push_back("c" + std::to_string(i));
    rows.clear();
    for (const OriginEstimates& est : result.estimates) {
        for (int j = 0; j < m; ++j) {
            std::vector<std::string> row = {est.date, level_label(config.grid.levels[j])};
            for (double c : est.weights[j].c) row.push_back(format_double(c));
            rows.push_back(std::move(row));
        }
    }
    write_csv(out_dir + "/weights.csv", header, rows);

    const bool shortfall_fit =
        config.variant == Variant::FcWq || config.variant == Variant::WqSingle;
    nlohmann::ordered_json origins = nlohmann::ordered_json::array();
    for (const OriginEstimates& est : result.estimates) {
        nlohmann::ordered_json entry;
        entry["h"] = est.h;
        entry["date"] = est.date;
        nlohmann::ordered_json comb;
        for (int j = 0; j < m; ++j)
            comb[level_label(config.grid.levels[j])] = est.weights[j].c;
        entry["combination"] = std::move(comb);
        if (shortfall_fit)
            entry["shortfall"] = {{"w0", est.wq.w0}, {"a", est.wq.a}, {"b", est.wq.b}};
        origins.push_back(std::move(entry));
    }
    nlohmann::ordered_json doc;
    doc["variant"] = variant_name(config.variant);
    doc["origins"] = std::move(origins);
    std::ofstream json_out(out_dir + "/weights.json", std::ios::binary);
    json_out << doc.dump(2) << "\n";

    rows.clear();
    for (const ForecastRecord& rec : result.records)
        for (int j = 0; j < m; ++j)
            rows.push_back({rec.date, level_label(config.grid.levels[j]),
                            format_double(rec.combined[j])});
    write_csv(out_dir + "/combined.csv", {"date", "level", "value"}, rows);

    rows.clear();
    std::size_t est_cursor = 0;
    for (std::size_t h_idx = 0; h_idx < result.records.size(); ++h_idx) {
        const ForecastRecord& rec = result.records[h_idx];
        while (est_cursor + 1 < result.estimates.size() &&
               result.estimates[est_cursor + 1].h <= static_cast<int>(h_idx) + 1)
            ++est_cursor;
        std::vector<std::string> row = {rec.date, format_double(rec.es), format_double(rec.var)};
        if (shortfall_fit && !result.estimates.empty()) {
            const WqParams& wq = result.estimates[est_cursor].wq;
            row.push_back(format_double(wq.w0));
            row.push_back(format_double(wq.a));
            row.push_back(format_double(wq.b));
        } else {
            row.insert(row.end(), {"", "", ""});
        }
        rows.push_back(std::move(row));
    }
    write_csv(out_dir + "/es.csv", {"date", "es_forecast", "var_forecast", "w0", "a", "b"}, rows);

    rows.clear();
    for (std::size_t h_idx = 0; h_idx < result.records.size(); ++h_idx) {
        const ForecastRecord& rec = result.records[h_idx];
        for (int j = 0; j < m; ++j)
            for (std::size_t i = 0; i < n_mod; ++i)
                if (result.panel.flags[j][i][n + static_cast<int>(h_idx)] == kFlagCf)
                    rows.push_back({rec.date, "carry", model_name(config.models[i]),
                                    level_label(config.grid.levels[j]), "previous forecast reused"});
        if (rec.es_crossed)
            rows.push_back({rec.date, "es-crossing", "", "",
                            "es " + format_double(rec.es) + " above var " +
                                format_double(rec.var)});
    }
    write_csv(out_dir + "/diagnostics.csv", {"date", "event", "model", "level", "detail"}, rows);
}

PanelData load_panel(const std::string& path, const PipelineConfig& config) {
    const CsvTable table = read_csv(path);
    const int c_date = table.column("date");
    const int c_level = table.column("level");
    const int c_model = table.column("model");
    const int c_value = table.column("value");
    const int c_flag = table.column("flag");
    if (c_date < 0 || c_level < 0 || c_model < 0 || c_value < 0 || c_flag < 0)
        throw std::invalid_argument("panel csv: missing required columns");

    const int m = config.grid.m();
    const std::size_t n_mod = config.models.size();
    const std::size_t t_total =
        static_cast<std::size_t>(config.window.h > 0 ? config.window.n + config.window.h : 0);
    std::map<std::string, std::size_t> model_index;
    for (std::size_t i = 0; i < n_mod; ++i) model_index[model_name(config.models[i])] = i;

    PanelData panel;
    panel.values.assign(m, std::vector<std::vector<double>>(n_mod, std::vector<double>(t_total)));
    panel.flags.assign(m, std::vector<std::vector<char>>(n_mod, std::vector<char>(t_total)));
    std::vector<std::vector<std::vector<char>>> seen(
        m, std::vector<std::vector<char>>(n_mod, std::vector<char>(t_total, 0)));

    std::map<std::string, std::size_t> date_index;
    for (const std::vector<std::string>& row : table.rows) {
        const std::size_t t =
            date_index.try_emplace(row[c_date], date_index.size()).first->second;
        if (t >= t_total) throw std::invalid_argument("panel csv: more dates than N+H");
        const double level = parse_double(row[c_level], "panel level");
        int j = -1;
        for (int k = 0; k < m; ++k)
            if (std::abs(config.grid.levels[k] - level) < 1e-9) j = k;
        if (j < 0) throw std::invalid_argument("panel csv: level " + row[c_level] + " not in grid");
        auto model_it = model_index.find(row[c_model]);
        if (model_it == model_index.end())
            throw std::invalid_argument("panel csv: model " + row[c_model] + " not in universe");
        const std::size_t i = model_it->second;
        char flag;
        if (row[c_flag] == "IS")
            flag = kFlagIs;
        else if (row[c_flag] == "FC")
            flag = kFlagFc;
        else if (row[c_flag] == "CF")
            flag = kFlagCf;
        else
            throw std::invalid_argument("panel csv: unknown flag " + row[c_flag]);
        panel.values[j][i][t] = parse_double(row[c_value], "panel value");
        panel.flags[j][i][t] = flag;
        seen[j][i][t] = 1;
    }
    if (date_index.size() != t_total)
        throw std::invalid_argument("panel csv: date count does not match N+H");
    for (int j = 0; j < m; ++j)
        for (std::size_t i = 0; i < n_mod; ++i)
            for (std::size_t t = 0; t < t_total; ++t)
                if (!seen[j][i][t]) throw std::invalid_argument("panel csv: missing cells");
    return panel;
}

}  // namespace fcwq
