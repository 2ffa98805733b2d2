#pragma once

#include <string>
#include <vector>

namespace fcwq {

// Daily percent log-returns keyed by strictly increasing ISO-8601 dates.
struct ReturnSeries {
    std::vector<std::string> dates;
    std::vector<double> returns;

    int size() const { return static_cast<int>(returns.size()); }
};

// Rolling scheme: window h (1-based) covers observations h .. N+h-1.
struct WindowSpec {
    int n = 0;  // in-sample length N
    int h = 0;  // out-of-sample length H
};

// Joint (VaR, ES) forecast in return units; es < 0 required wherever the
// joint score consumes it.
struct RiskForecast {
    double var = 0.0;
    double es = 0.0;
};

// Throws std::invalid_argument on malformed dates, non-finite returns, or
// length mismatch.
void validate_series(const ReturnSeries& s);

}  // namespace fcwq
