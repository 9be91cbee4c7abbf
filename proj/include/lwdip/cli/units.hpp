#pragma once

#include <optional>
#include <string_view>

namespace lwdip::cli {

enum class Dimension { length, time, frequency, charge, velocity };

/// Values some units are defined relative to. "R0" needs the drive's static
/// separation, "g" the coherent coupling at that separation.
struct UnitContext {
    std::optional<double> R0;
    std::optional<double> g;
};

/// Converts "<number> <unit>" (whitespace optional) to SI. Hz-family
/// frequencies are multiplied by 2 pi unless `angular` is set; "rad/s" and
/// "g" are already angular. Throws UnitError (line 0) on any problem.
double parse_quantity(std::string_view text, Dimension dim, const UnitContext& ctx = {}, bool angular = false);

/// The canonical SI suffix written back by run_meta.toml.
const char* si_unit(Dimension dim);

} // namespace lwdip::cli
