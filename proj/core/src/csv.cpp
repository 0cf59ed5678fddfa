#include "abcdquant/csv.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "abcdquant/error.hpp"

namespace abcdq {

namespace {

std::vector<std::vector<std::string>> parse_records(const std::string& text) {
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> record;
    std::string field;
    bool quoted = false;
    bool any = false;

    std::size_t i = 0;
    const std::size_t n = text.size();
    auto end_field = [&] {
        record.push_back(field);
        field.clear();
    };
    auto end_record = [&] {
        end_field();
        records.push_back(record);
        record.clear();
        any = false;
    };
    while (i < n) {
        const char c = text[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < n && text[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field.push_back(c);
            }
        } else if (c == '"' && field.empty()) {
            quoted = true;
            any = true;
        } else if (c == ',') {
            end_field();
            any = true;
        } else if (c == '\n') {
            if (any || !field.empty() || !record.empty()) end_record();
        } else if (c == '\r') {
            // swallowed; CRLF handled by the '\n' branch
        } else {
            field.push_back(c);
            any = true;
        }
        ++i;
    }
    if (any || !field.empty() || !record.empty()) end_record();
    return records;
}

bool needs_quoting(const std::string& s) {
    return s.find_first_of(",\"\n\r") != std::string::npos;
}

} // namespace

std::size_t CsvTable::column(const std::string& name) const {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end())
        throw InvalidInput("missing required CSV column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
}

bool CsvTable::has_column(const std::string& name) const {
    return std::find(header.begin(), header.end(), name) != header.end();
}

CsvTable parse_csv(const std::string& text) {
    auto records = parse_records(text);
    if (records.empty()) throw InvalidInput("empty CSV input");
    CsvTable table;
    table.header = records.front();
    table.rows.assign(records.begin() + 1, records.end());
    for (std::size_t r = 0; r < table.rows.size(); ++r)
        if (table.rows[r].size() != table.header.size())
            throw InvalidInput("CSV row " + std::to_string(r + 1) + " has " +
                               std::to_string(table.rows[r].size()) + " fields, expected " +
                               std::to_string(table.header.size()));
    return table;
}

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidInput("cannot open CSV file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_csv(buf.str());
}

std::string to_csv(const CsvTable& table) {
    std::string out;
    auto emit_row = [&out](const std::vector<std::string>& row) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out.push_back(',');
            if (needs_quoting(row[i])) {
                out.push_back('"');
                for (char c : row[i]) {
                    if (c == '"') out.push_back('"');
                    out.push_back(c);
                }
                out.push_back('"');
            } else {
                out += row[i];
            }
        }
        out.push_back('\n');
    };
    emit_row(table.header);
    for (const auto& row : table.rows) emit_row(row);
    return out;
}

void write_csv(const CsvTable& table, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidInput("cannot write CSV file: " + path);
    out << to_csv(table);
    if (!out) throw InvalidInput("write failed: " + path);
}

double parse_cell_double(const std::string& cell, std::size_t row, const std::string& col) {
    char* end = nullptr;
    const double v = std::strtod(cell.c_str(), &end);
    if (cell.empty() || end != cell.c_str() + cell.size())
        throw InvalidInput("row " + std::to_string(row) + ": column '" + col +
                           "' is not a number: '" + cell + "'");
    return v;
}

} // namespace abcdq
