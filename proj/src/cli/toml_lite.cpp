#include "lwdip/cli/toml_lite.hpp"

#include "lwdip/cli/config_errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>

namespace lwdip::cli::toml {

namespace {

class LineParser {
public:
    LineParser(std::string_view text, int line) : s_(text), line_(line) {}

    [[noreturn]] void fail(const std::string& msg) const {
        throw ConfigSyntaxError(fmt::format("line {}: {}", line_, msg), line_);
    }

    void skip_ws() {
        while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t')) ++pos_;
    }
    bool at_end() {
        skip_ws();
        return pos_ >= s_.size() || s_[pos_] == '#';
    }
    char peek() {
        skip_ws();
        return pos_ < s_.size() ? s_[pos_] : '\0';
    }
    void expect(char c) {
        if (peek() != c) fail(fmt::format("expected '{}'", c));
        ++pos_;
    }

    std::string key() {
        skip_ws();
        if (pos_ < s_.size() && (s_[pos_] == '"' || s_[pos_] == '\'')) return string_value();
        const std::size_t start = pos_;
        while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_' ||
                                    s_[pos_] == '-' || s_[pos_] == '.')) {
            ++pos_;
        }
        if (pos_ == start) fail("expected a key");
        return std::string(s_.substr(start, pos_ - start));
    }

    Value value() {
        const char c = peek();
        if (c == '"' || c == '\'') return Value{string_value()};
        if (c == '[') return array_value();
        if (c == '{') return table_value();
        if (s_.substr(pos_).starts_with("true")) {
            pos_ += 4;
            return Value{true};
        }
        if (s_.substr(pos_).starts_with("false")) {
            pos_ += 5;
            return Value{false};
        }
        return number_value();
    }

private:
    std::string string_value() {
        const char quote = s_[pos_++];
        std::string out;
        while (pos_ < s_.size() && s_[pos_] != quote) {
            char c = s_[pos_++];
            if (quote == '"' && c == '\\') {
                if (pos_ >= s_.size()) fail("unterminated escape");
                const char e = s_[pos_++];
                switch (e) {
                case 'n': c = '\n'; break;
                case 't': c = '\t'; break;
                case '"': c = '"'; break;
                case '\\': c = '\\'; break;
                default: fail(fmt::format("unsupported escape '\\{}'", e));
                }
            }
            out.push_back(c);
        }
        if (pos_ >= s_.size()) fail("unterminated string");
        ++pos_;
        return out;
    }

    Value array_value() {
        expect('[');
        Array items;
        while (peek() != ']') {
            if (at_end()) fail("unterminated array (arrays must fit on one line)");
            items.push_back(value());
            if (peek() == ',') ++pos_;
            else if (peek() != ']') fail("expected ',' or ']' in array");
        }
        ++pos_;
        return Value{std::move(items)};
    }

    Value table_value() {
        expect('{');
        InlineTable items;
        while (peek() != '}') {
            if (at_end()) fail("unterminated inline table");
            std::string k = key();
            expect('=');
            if (std::any_of(items.begin(), items.end(), [&](const auto& kv) { return kv.first == k; })) {
                fail(fmt::format("duplicate key '{}' in inline table", k));
            }
            items.emplace_back(std::move(k), value());
            if (peek() == ',') ++pos_;
            else if (peek() != '}') fail("expected ',' or '}' in inline table");
        }
        ++pos_;
        return Value{std::move(items)};
    }

    Value number_value() {
        skip_ws();
        const std::size_t start = pos_;
        while (pos_ < s_.size() && s_[pos_] != ',' && s_[pos_] != ']' && s_[pos_] != '}' && s_[pos_] != '#' &&
               s_[pos_] != ' ' && s_[pos_] != '\t') {
            ++pos_;
        }
        std::string raw(s_.substr(start, pos_ - start));
        if (raw.empty()) fail("expected a value");
        std::string text;
        for (std::size_t i = 0; i < raw.size(); ++i) {
            if (raw[i] == '_') {
                const bool ok = i > 0 && i + 1 < raw.size() && std::isdigit(static_cast<unsigned char>(raw[i - 1])) &&
                                std::isdigit(static_cast<unsigned char>(raw[i + 1]));
                if (!ok) fail(fmt::format("misplaced '_' in number '{}'", raw));
                continue;
            }
            text.push_back(raw[i]);
        }
        std::string_view body = text;
        if (!body.empty() && body.front() == '+') body.remove_prefix(1);
        double v = 0.0;
        const auto [end, ec] = std::from_chars(body.data(), body.data() + body.size(), v);
        if (ec != std::errc{} || end != body.data() + body.size()) fail(fmt::format("invalid value '{}'", raw));
        Value out{v};
        out.integer_literal = body.find_first_of(".eEin") == std::string_view::npos;
        return out;
    }

    std::string_view s_;
    int line_;
    std::size_t pos_ = 0;
};

} // namespace

Document parse(std::string_view text) {
    Document doc;
    std::string current;
    int line_no = 0;
    std::size_t begin = 0;
    while (begin <= text.size()) {
        std::size_t end = text.find('\n', begin);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(begin, end - begin);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        ++line_no;
        begin = end + 1;

        LineParser p(line, line_no);
        if (p.at_end()) {
            if (end == text.size()) break;
            continue;
        }
        if (p.peek() == '[') {
            p.expect('[');
            const std::string name = p.key();
            p.expect(']');
            if (!p.at_end()) p.fail("trailing characters after section header");
            if (std::any_of(doc.sections.begin(), doc.sections.end(),
                            [&](const SectionHeader& h) { return h.name == name; })) {
                p.fail(fmt::format("duplicate section [{}]", name));
            }
            doc.sections.push_back({name, line_no});
            current = name;
        } else {
            std::string key = p.key();
            p.expect('=');
            Value v = p.value();
            if (!p.at_end()) p.fail("trailing characters after value");
            if (std::any_of(doc.entries.begin(), doc.entries.end(),
                            [&](const Entry& e) { return e.section == current && e.key == key; })) {
                p.fail(fmt::format("duplicate key '{}'", key));
            }
            doc.entries.push_back({current, std::move(key), std::move(v), line_no});
        }
        if (end == text.size()) break;
    }
    return doc;
}

} // namespace lwdip::cli::toml
