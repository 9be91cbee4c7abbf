#pragma once

// Reader for the subset of TOML used by run configurations: [section] headers
// (dotted names kept verbatim), key = value pairs on one line, basic and
// literal strings, numbers with optional underscores, booleans, single-line
// arrays and inline tables. Comments start with '#'.

#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace lwdip::cli::toml {

struct Value;
using Array = std::vector<Value>;
using InlineTable = std::vector<std::pair<std::string, Value>>;

struct Value {
    std::variant<std::string, double, bool, Array, InlineTable> data;
    bool integer_literal = false;  // number written without '.', exponent or inf/nan

    bool is_string() const { return std::holds_alternative<std::string>(data); }
    bool is_number() const { return std::holds_alternative<double>(data); }
    bool is_bool() const { return std::holds_alternative<bool>(data); }
    bool is_array() const { return std::holds_alternative<Array>(data); }
    bool is_table() const { return std::holds_alternative<InlineTable>(data); }
    const std::string& as_string() const { return std::get<std::string>(data); }
    double as_number() const { return std::get<double>(data); }
    bool as_bool() const { return std::get<bool>(data); }
    const Array& as_array() const { return std::get<Array>(data); }
    const InlineTable& as_table() const { return std::get<InlineTable>(data); }
};

struct Entry {
    std::string section;  // "" before the first header
    std::string key;
    Value value;
    int line = 0;
};

struct SectionHeader {
    std::string name;
    int line = 0;
};

struct Document {
    std::vector<SectionHeader> sections;
    std::vector<Entry> entries;
};

/// Throws ConfigSyntaxError carrying the 1-based line number.
Document parse(std::string_view text);

} // namespace lwdip::cli::toml
