#pragma once

#include <optional>
#include <string>
#include <vector>

namespace engage::csv {

// Minimal CSV support for the File S1-style exports this toolkit consumes:
// comma separated, one header row, UTF-8, no quoting or embedded commas,
// missing values as empty cells.

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

Table read_file(const std::string& path);
Table read_string(const std::string& text);

void write_file(const std::string& path, const Table& table);
std::string write_string(const Table& table);

// Shortest decimal representation that parses back to the same double.
std::string format_double(double v);

// Parses a cell; empty cells yield nullopt. Throws on garbage, reporting
// the 1-based row and the column name.
std::optional<double> parse_cell(const std::string& cell, std::size_t row_1based,
                                 const std::string& column);

}  // namespace engage::csv
