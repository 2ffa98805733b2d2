#include "fcwq/data.hpp"

#include <cmath>
#include <stdexcept>

#include "fcwq/csv.hpp"

namespace fcwq {

ReturnSeries returns_from_prices(const std::vector<std::string>& dates,
                                 const std::vector<double>& prices) {
    if (dates.size() != prices.size())
        throw std::invalid_argument("returns_from_prices: dates/prices length mismatch");
    if (prices.size() < 2)
        throw std::invalid_argument("returns_from_prices: need at least two prices");
    ReturnSeries out;
    out.dates.assign(dates.begin() + 1, dates.end());
    out.returns.resize(prices.size() - 1);
    for (std::size_t t = 1; t < prices.size(); ++t) {
        if (!(prices[t] > 0.0) || !(prices[t - 1] > 0.0))
            throw std::invalid_argument("returns_from_prices: non-positive price at row " +
                                        std::to_string(t + 1));
        out.returns[t - 1] = 100.0 * std::log(prices[t] / prices[t - 1]);
    }
    validate_series(out);
    return out;
}

namespace {

struct RawColumns {
    std::vector<std::string> dates;
    std::vector<double> values;
};

RawColumns read_value_column(const std::string& path, const std::string& column) {
    const CsvTable table = read_csv(path);
    if (table.header.size() < 2)
        throw std::invalid_argument(path + ": need a date column and a value column");
    int vcol = 1;
    if (!column.empty()) {
        vcol = table.column(column);
        if (vcol < 0) throw std::invalid_argument(path + ": no column named '" + column + "'");
        if (vcol == 0) throw std::invalid_argument(path + ": '" + column + "' is the date column");
    }
    RawColumns out;
    out.dates.reserve(table.rows.size());
    out.values.reserve(table.rows.size());
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto& row = table.rows[i];
        if (i > 0 && !(out.dates.back() < row[0]))
            throw std::invalid_argument(path + ": dates not strictly increasing at row " +
                                        std::to_string(i + 2));
        out.dates.push_back(row[0]);
        out.values.push_back(
            parse_double(row[static_cast<std::size_t>(vcol)],
                         path + " row " + std::to_string(i + 2)));
    }
    return out;
}

}  // namespace

ReturnSeries load_prices(const std::string& path, const std::string& column) {
    RawColumns raw = read_value_column(path, column);
    if (raw.values.size() < 2)
        throw std::invalid_argument(path + ": need at least two price rows");
    return returns_from_prices(raw.dates, raw.values);
}

ReturnSeries load_returns(const std::string& path, const std::string& column) {
    RawColumns raw = read_value_column(path, column);
    ReturnSeries out;
    out.dates = std::move(raw.dates);
    out.returns = std::move(raw.values);
    validate_series(out);
    return out;
}

std::vector<std::span<const double>> rolling_windows(const ReturnSeries& series,
                                                     const WindowSpec& spec) {
    const int t = series.size();
    if (spec.n <= 0) throw std::invalid_argument("rolling_windows: N must be positive");
    if (spec.h < 0) throw std::invalid_argument("rolling_windows: H must be nonnegative");
    if (spec.n + spec.h > t)
        throw std::invalid_argument("rolling_windows: N + H = " +
                                    std::to_string(spec.n + spec.h) + " exceeds T = " +
                                    std::to_string(t));
    std::vector<std::span<const double>> out;
    out.reserve(static_cast<std::size_t>(spec.h));
    for (int h = 1; h <= spec.h; ++h)
        out.emplace_back(series.returns.data() + (h - 1), static_cast<std::size_t>(spec.n));
    return out;
}

}  // namespace fcwq
