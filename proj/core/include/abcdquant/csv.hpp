#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace abcdq {

/// Minimal RFC-4180 table: a header row plus data rows.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Index of a header column; throws InvalidInput when absent.
    std::size_t column(const std::string& name) const;
    bool has_column(const std::string& name) const;
};

CsvTable read_csv(const std::string& path);
CsvTable parse_csv(const std::string& text);

/// Serializes with quoting where required and LF line endings.
std::string to_csv(const CsvTable& table);
void write_csv(const CsvTable& table, const std::string& path);

/// Strict double parser for CSV cells; errors carry the 1-based data
/// row number and column name.
double parse_cell_double(const std::string& cell, std::size_t row, const std::string& col);

} // namespace abcdq
