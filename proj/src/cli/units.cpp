#include "lwdip/cli/units.hpp"

#include "lwdip/cli/config_errors.hpp"
#include "lwdip/core/constants.hpp"

#include <fmt/format.h>

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <string>

namespace lwdip::cli {

namespace {

struct UnitDef {
    std::string_view name;
    Dimension dim;
    double scale;
    bool hz_family = false;
};

constexpr std::array<UnitDef, 27> kUnits{{
    {"m", Dimension::length, 1.0},
    {"cm", Dimension::length, 1e-2},
    {"mm", Dimension::length, 1e-3},
    {"um", Dimension::length, 1e-6},
    {"nm", Dimension::length, 1e-9},
    {"pm", Dimension::length, 1e-12},
    {"fm", Dimension::length, 1e-15},
    {"s", Dimension::time, 1.0},
    {"ms", Dimension::time, 1e-3},
    {"us", Dimension::time, 1e-6},
    {"ns", Dimension::time, 1e-9},
    {"ps", Dimension::time, 1e-12},
    {"fs", Dimension::time, 1e-15},
    {"as", Dimension::time, 1e-18},
    {"Hz", Dimension::frequency, 1.0, true},
    {"kHz", Dimension::frequency, 1e3, true},
    {"MHz", Dimension::frequency, 1e6, true},
    {"GHz", Dimension::frequency, 1e9, true},
    {"THz", Dimension::frequency, 1e12, true},
    {"PHz", Dimension::frequency, 1e15, true},
    {"rad/s", Dimension::frequency, 1.0},
    {"C", Dimension::charge, 1.0},
    {"e", Dimension::charge, constants::e},
    {"m/s", Dimension::velocity, 1.0},
    {"km/s", Dimension::velocity, 1e3},
    {"c", Dimension::velocity, constants::c},
    {"um/s", Dimension::velocity, 1e-6},
}};

const char* dimension_name(Dimension d) {
    switch (d) {
    case Dimension::length: return "length";
    case Dimension::time: return "time";
    case Dimension::frequency: return "frequency";
    case Dimension::charge: return "charge";
    case Dimension::velocity: return "velocity";
    }
    return "?";
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

} // namespace

const char* si_unit(Dimension dim) {
    switch (dim) {
    case Dimension::length: return "m";
    case Dimension::time: return "s";
    case Dimension::frequency: return "rad/s";
    case Dimension::charge: return "C";
    case Dimension::velocity: return "m/s";
    }
    return "";
}

double parse_quantity(std::string_view text, Dimension dim, const UnitContext& ctx, bool angular) {
    const std::string_view s = trim(text);
    std::string_view body = s;
    if (!body.empty() && body.front() == '+') body.remove_prefix(1);
    double number = 0.0;
    const auto [end, ec] = std::from_chars(body.data(), body.data() + body.size(), number);
    if (ec != std::errc{} || end == body.data()) {
        throw UnitError(fmt::format("'{}' does not start with a number", s));
    }
    const std::string_view unit = trim(std::string_view(end, static_cast<std::size_t>(body.data() + body.size() - end)));
    if (unit.empty()) {
        throw UnitError(fmt::format("'{}' has no unit; a {} unit is required", s, dimension_name(dim)));
    }

    if (dim == Dimension::length && unit == "R0") {
        if (!ctx.R0) throw UnitError(fmt::format("'{}': unit R0 needs [drive] R0", s));
        return number * *ctx.R0;
    }
    if (dim == Dimension::frequency && unit == "g") {
        if (!ctx.g) throw UnitError(fmt::format("'{}': unit g needs two dipoles and a separation", s));
        return number * *ctx.g;
    }
    for (const UnitDef& u : kUnits) {
        if (u.name != unit) continue;
        if (u.dim != dim) {
            throw UnitError(fmt::format("'{}': unit '{}' is a {} unit, expected {}", s, unit, dimension_name(u.dim),
                                        dimension_name(dim)));
        }
        const double v = number * u.scale;
        return (u.hz_family && !angular) ? 2.0 * constants::pi * v : v;
    }
    throw UnitError(fmt::format("'{}': unknown unit '{}'", s, unit));
}

} // namespace lwdip::cli
