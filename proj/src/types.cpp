#include "fcwq/types.hpp"

#include <cmath>
#include <stdexcept>

namespace fcwq {

namespace {

bool iso_date_ok(const std::string& d) {
    if (d.size() != 10 || d[4] != '-' || d[7] != '-') return false;
    for (int i : {0, 1, 2, 3, 5, 6, 8, 9})
        if (d[i] < '0' || d[i] > '9') return false;
    return true;
}

}  // namespace

void validate_series(const ReturnSeries& s) {
    if (s.dates.size() != s.returns.size())
        throw std::invalid_argument("return series: dates/returns length mismatch");
    for (std::size_t i = 0; i < s.returns.size(); ++i) {
        if (!std::isfinite(s.returns[i]))
            throw std::invalid_argument("return series: non-finite return at row " +
                                        std::to_string(i + 1));
        if (!iso_date_ok(s.dates[i]))
            throw std::invalid_argument("return series: bad ISO date '" + s.dates[i] +
                                        "' at row " + std::to_string(i + 1));
        // Same-format ISO dates order lexicographically.
        if (i > 0 && !(s.dates[i - 1] < s.dates[i]))
            throw std::invalid_argument("return series: dates not strictly increasing at row " +
                                        std::to_string(i + 1));
    }
}

}  // namespace fcwq
