#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace lwdip::csv {

/// Shortest-safe round-trip text for a double: 17 significant digits.
std::string format_double(double v);

/// Writes a header row then one row per index; every column must have equal length.
void write_columns(std::ostream& os, const std::vector<std::string>& header,
                   const std::vector<const std::vector<double>*>& columns);

/// A numeric CSV table with a header row.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<double>> columns;

    /// Column by header name; throws std::out_of_range when absent.
    const std::vector<double>& column(const std::string& name) const;
};

/// Parses a comma-separated numeric table. Throws std::runtime_error on malformed rows.
Table read_table(std::istream& is);

} // namespace lwdip::csv
