#include "lwdip/core/csv.hpp"

#include <fmt/format.h>

#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace lwdip::csv {

std::string format_double(double v) { return fmt::format("{:.17g}", v); }

void write_columns(std::ostream& os, const std::vector<std::string>& header,
                   const std::vector<const std::vector<double>*>& columns) {
    if (header.size() != columns.size()) throw std::invalid_argument("write_columns: header/column count mismatch");
    const std::size_t rows = columns.empty() ? 0 : columns.front()->size();
    for (const auto* col : columns) {
        if (col->size() != rows) throw std::invalid_argument("write_columns: ragged columns");
    }
    for (std::size_t j = 0; j < header.size(); ++j) os << (j ? "," : "") << header[j];
    os << '\n';
    std::string line;
    for (std::size_t i = 0; i < rows; ++i) {
        line.clear();
        for (std::size_t j = 0; j < columns.size(); ++j) {
            if (j) line += ',';
            fmt::format_to(std::back_inserter(line), "{:.17g}", (*columns[j])[i]);
        }
        line += '\n';
        os << line;
    }
}

const std::vector<double>& Table::column(const std::string& name) const {
    for (std::size_t j = 0; j < header.size(); ++j) {
        if (header[j] == name) return columns[j];
    }
    throw std::out_of_range("csv: no column named '" + name + "'");
}

Table read_table(std::istream& is) {
    Table t;
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("csv: missing header row");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    {
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) t.header.push_back(cell);
    }
    t.columns.resize(t.header.size());
    std::size_t row = 1;
    while (std::getline(is, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::size_t col = 0;
        std::size_t pos = 0;
        while (pos <= line.size()) {
            const std::size_t next = std::min(line.find(',', pos), line.size());
            if (col >= t.columns.size()) throw std::runtime_error("csv: too many fields on row " + std::to_string(row));
            double v = 0.0;
            const char* first = line.data() + pos;
            const char* last = line.data() + next;
            auto [ptr, ec] = std::from_chars(first, last, v);
            if (ec != std::errc() || ptr != last) {
                throw std::runtime_error("csv: bad number on row " + std::to_string(row) + " column " +
                                         std::to_string(col + 1));
            }
            t.columns[col].push_back(v);
            ++col;
            pos = next + 1;
        }
        if (col != t.columns.size()) throw std::runtime_error("csv: too few fields on row " + std::to_string(row));
    }
    return t;
}

} // namespace lwdip::csv
