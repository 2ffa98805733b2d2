#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "fcwq/types.hpp"

namespace fcwq {

// Percent log-returns from a price path: r_t = 100 ln(P_t / P_{t-1}),
// dates aligned to P_t. Requires at least two prices.
ReturnSeries returns_from_prices(const std::vector<std::string>& dates,
                                 const std::vector<double>& prices);

// CSV loaders. The first column is the date column; `column` names the value
// column, or "" for the first column after the dates.
ReturnSeries load_prices(const std::string& path, const std::string& column = "");
ReturnSeries load_returns(const std::string& path, const std::string& column = "");

// Window h (1-based, h = 1..H) viewing observations h .. N+h-1.
std::vector<std::span<const double>> rolling_windows(const ReturnSeries& series,
                                                     const WindowSpec& spec);

}  // namespace fcwq
