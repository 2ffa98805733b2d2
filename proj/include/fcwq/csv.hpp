#pragma once

#include <string>
#include <vector>

namespace fcwq {

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    // Index of a header column, -1 if absent.
    int column(const std::string& name) const;
};

// Reads a comma-separated file with a header row. No quoting support: the
// formats this project reads and writes are plain numeric columns.
CsvTable read_csv(const std::string& path);

// %.17g round-trips doubles exactly, which byte-stable outputs rely on.
std::string format_double(double v);

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

double parse_double(const std::string& cell, const std::string& context);

}  // namespace fcwq
