#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fcwq/csv.hpp"
#include "fcwq/data.hpp"
#include "fcwq/evaluation.hpp"
#include "fcwq/pipeline.hpp"
#include "fcwq/simulate.hpp"
#include "json.hpp"

namespace {

using namespace fcwq;

std::string level_tag(double level) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", level);
    return buf;
}

std::vector<double> parse_levels(const std::string& text) {
    std::vector<double> levels;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t comma = std::min(text.find(',', pos), text.size());
        levels.push_back(parse_double(text.substr(pos, comma - pos), "level list"));
        pos = comma + 1;
    }
    return levels;
}

int cmd_run(const std::string& config_path, const std::string& input_path,
            const std::string& input_kind, const std::string& input_column,
            const std::string& out_dir) {
    const Config cfg = Config::from_file(config_path);
    const PipelineConfig config = pipeline_config(cfg);
    const ReturnSeries series = input_kind == "price" ? load_prices(input_path, input_column)
                                                      : load_returns(input_path, input_column);
    const PipelineResult result = run_pipeline(config, series);
    write_outputs(result, out_dir);

    int carried = 0, crossed = 0;
    for (const ForecastRecord& rec : result.records) {
        carried += rec.carried_cells;
        crossed += rec.es_crossed;
    }
    std::printf("%s: %zu forecasts, %zu estimation origins, %d carried cells, %d es crossings\n",
                out_dir.c_str(), result.records.size(), result.estimates.size(), carried, crossed);
    return 0;
}

int cmd_evaluate(const std::vector<std::string>& forecast_paths, const std::string& returns_path,
                 const std::string& returns_column, double alpha, const std::string& out_path) {
    const ReturnSeries series = load_returns(returns_path, returns_column);
    std::map<std::string, double> by_date;
    for (int t = 0; t < series.size(); ++t) by_date[series.dates[t]] = series.returns[t];

    std::vector<ModelForecasts> models;
    std::vector<std::string> dates;
    std::vector<double> aligned;
    for (const std::string& path : forecast_paths) {
        const CsvTable table = read_csv(path);
        const int c_date = table.column("date");
        const int c_var = table.column("var");
        const int c_es = table.column("es");
        if (c_date < 0 || c_var < 0 || c_es < 0)
            throw std::invalid_argument(path + ": needs date, var, es columns");
        ModelForecasts mf;
        mf.name = std::filesystem::path(path).stem().string();
        std::vector<std::string> model_dates;
        for (const std::vector<std::string>& row : table.rows) {
            model_dates.push_back(row[c_date]);
            mf.forecasts.push_back({parse_double(row[c_var], "var"),
                                    parse_double(row[c_es], "es")});
        }
        if (models.empty()) {
            dates = std::move(model_dates);
            for (const std::string& d : dates) {
                const auto it = by_date.find(d);
                if (it == by_date.end())
                    throw std::invalid_argument("evaluate: no return for date " + d);
                aligned.push_back(it->second);
            }
        } else if (model_dates != dates) {
            throw std::invalid_argument(path + ": forecast dates differ from " +
                                        forecast_paths.front());
        }
        models.push_back(std::move(mf));
    }

    const BacktestReport report = build_report(models, aligned, alpha);

    auto number_or_null = [](double v) {
        return std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json(nullptr);
    };
    nlohmann::ordered_json entries = nlohmann::ordered_json::array();
    for (const ModelMetrics& mm : report.models) {
        nlohmann::ordered_json entry;
        entry["name"] = mm.name;
        entry["vrate"] = mm.vrate;
        entry["vrate_ratio"] = mm.vrate_ratio;
        entry["abs_dev"] = mm.abs_dev;
        entry["aggregate_ql"] = mm.aggregate_ql;
        entry["aggregate_joint"] = number_or_null(mm.aggregate_joint);
        entry["p_var"] = number_or_null(mm.p_var);
        entry["p_es"] = number_or_null(mm.p_es);
        entry["best_ql"] = mm.best_ql;
        entry["second_ql"] = mm.second_ql;
        entry["best_joint"] = mm.best_joint;
        entry["second_joint"] = mm.second_joint;
        entries.push_back(std::move(entry));
    }
    nlohmann::ordered_json doc;
    doc["alpha"] = report.alpha;
    doc["h"] = report.h;
    doc["models"] = std::move(entries);

    const std::filesystem::path out(out_path);
    if (out.has_parent_path()) std::filesystem::create_directories(out.parent_path());
    std::ofstream json_out(out_path, std::ios::binary);
    if (!json_out) throw std::runtime_error("cannot write " + out_path);
    json_out << doc.dump(2) << "\n";

    std::vector<std::vector<std::string>> rows;
    for (const ModelMetrics& mm : report.models)
        for (std::size_t t = 0; t < dates.size(); ++t)
            rows.push_back({dates[t], mm.name, format_double(mm.ql_series[t]),
                            mm.joint_series.empty() ? "" : format_double(mm.joint_series[t])});
    const std::string losses_path =
        (out.has_parent_path() ? out.parent_path() / "losses.csv"
                               : std::filesystem::path("losses.csv"))
            .string();
    write_csv(losses_path, {"date", "model", "ql", "joint_loss"}, rows);

    std::printf("%s: %zu models over %d observations; losses in %s\n", out_path.c_str(),
                report.models.size(), report.h, losses_path.c_str());
    return 0;
}

int cmd_simulate(const Dgp& dgp, const std::string& levels_text, const std::string& out_path) {
    const std::vector<double> levels = parse_levels(levels_text);
    const SimulatedPath path = simulate(dgp, levels);

    std::vector<std::string> header = {"date", "return", "sigma"};
    for (double level : levels) {
        header.push_back("true_var_" + level_tag(level));
        header.push_back("true_es_" + level_tag(level));
    }
    std::vector<std::vector<std::string>> rows;
    for (int t = 0; t < path.series.size(); ++t) {
        std::vector<std::string> row = {path.series.dates[t],
                                        format_double(path.series.returns[t]),
                                        format_double(path.sigma[t])};
        for (std::size_t j = 0; j < levels.size(); ++j) {
            row.push_back(format_double(path.true_var[j][t]));
            row.push_back(format_double(path.true_es[j][t]));
        }
        rows.push_back(std::move(row));
    }
    const std::filesystem::path out(out_path);
    if (out.has_parent_path()) std::filesystem::create_directories(out.parent_path());
    write_csv(out_path, header, rows);
    std::printf("%s: %d observations, %zu levels\n", out_path.c_str(), path.series.size(),
                levels.size());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quantile forecast combination with weighted-quantile expected shortfall"};
    app.require_subcommand(1);

    std::string config_path, input_path, out_dir;
    std::string input_kind = "return";
    std::string input_column;
    CLI::App* run = app.add_subcommand("run", "Run the rolling forecast pipeline");
    run->add_option("--config", config_path, "key = value configuration file")
        ->required()
        ->check(CLI::ExistingFile);
    run->add_option("--input", input_path, "CSV with a date column and a value column")
        ->required()
        ->check(CLI::ExistingFile);
    run->add_option("--input-kind", input_kind, "price or return input")
        ->check(CLI::IsMember({"price", "return"}));
    run->add_option("--input-column", input_column, "value column name (default: first)");
    run->add_option("--out", out_dir, "output directory")->required();

    std::vector<std::string> forecast_paths;
    std::string returns_path, returns_column, report_path;
    double alpha = 0.025;
    CLI::App* evaluate = app.add_subcommand("evaluate", "Backtest forecast files against returns");
    evaluate
        ->add_option("--forecasts", forecast_paths,
                     "forecast CSVs (date, var, es); model named by file stem")
        ->required()
        ->check(CLI::ExistingFile);
    evaluate->add_option("--returns", returns_path, "return CSV aligned by date")
        ->required()
        ->check(CLI::ExistingFile);
    evaluate->add_option("--returns-column", returns_column, "value column name (default: first)");
    evaluate->add_option("--alpha", alpha, "target quantile level")
        ->check(CLI::Range(1e-6, 0.5));
    evaluate->add_option("--out", report_path, "report JSON path; losses.csv lands beside it")
        ->required();

    Dgp dgp;
    dgp.seed = 7;
    std::string dgp_name = "gjr-t";
    std::string levels_text = "0.005,0.015,0.025";
    std::string sim_path;
    CLI::App* sim = app.add_subcommand("simulate", "Generate returns with known VaR/ES truth");
    sim->add_option("--dgp", dgp_name, "gjr-t, egarch-t, or iid-t");
    sim->add_option("--t", dgp.t, "observations")->check(CLI::PositiveNumber);
    sim->add_option("--seed", dgp.seed, "generator seed");
    sim->add_option("--omega", dgp.omega, "variance intercept");
    sim->add_option("--alpha1", dgp.alpha1, "shock loading");
    sim->add_option("--gamma", dgp.gamma, "asymmetry loading");
    sim->add_option("--beta", dgp.beta, "persistence");
    sim->add_option("--nu", dgp.nu, "innovation degrees of freedom");
    sim->add_option("--levels", levels_text, "comma-separated truth levels");
    sim->add_option("--out", sim_path, "output CSV")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(config_path, input_path, input_kind, input_column, out_dir);
        if (evaluate->parsed())
            return cmd_evaluate(forecast_paths, returns_path, returns_column, alpha, report_path);
        dgp.kind = parse_dgp_kind(dgp_name);
        return cmd_simulate(dgp, levels_text, sim_path);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "fcwq: %s\n", e.what());
        return 1;
    }
}
