#pragma once

#include "lwdip/cli/config_errors.hpp"
#include "lwdip/floquet/floquet.hpp"
#include "lwdip/sim/dipole_sim.hpp"

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace lwdip::cli {

inline constexpr const char* kSoftwareVersion = "0.1.0";

struct SpectrumOptions {
    std::string column = "d_2";
    double prominence = 1e-3;
    double tolerance_bins = 1.0;
    bool floquet_lines = false;
};

struct FloquetOptions {
    std::vector<double> r_grid;  // empty: the drive's own R_M/R0
    int L = 0;                   // starting truncation; 0: automatic
    double weight_threshold = 1e-6;
    double window = 0.0;         // half-width around omega0, rad/s; 0: automatic
};

/// Everything one invocation needs, in SI units.
struct RunConfig {
    sim::SimulationConfig simulation;
    std::optional<std::size_t> driven_dipole;  // 0-based index of the dipole carrying [drive]
    double separation = 0.0;  // static distance between dipoles 1 and 2 (drive R0 when driven), m
    double g = 0.0;           // coherent coupling at that separation, rad/s; 0 for a single dipole
    SpectrumOptions spectrum;
    FloquetOptions floquet;
    std::string output_dir = "out";
    unsigned threads = 0;  // 0: all cores

    double omega0() const { return simulation.dipoles.front().params.omega0; }
    /// R_M/R0 and omega_M of the drive; r = 0 and omega_M = g when undriven.
    floquet::DriveSpec drive_spec() const;
    floquet::CoupledHOParams coupled_params() const;
};

/// Throws MissingFileError, ConfigSyntaxError, UnitError or ConfigInvariantError.
RunConfig parse_config(const std::filesystem::path& path);
RunConfig parse_config_text(std::string_view text, const std::string& origin = "<config>");

/// Writes a config that parses back to the same RunConfig, every physical
/// value in SI with 17 significant digits.
void write_run_meta(std::ostream& os, const RunConfig& cfg);

/// "a:b:step" inclusive of b (to within step/1e6), or a single number.
std::vector<double> parse_range(std::string_view text);

/// Accepts "1e6", "1000000" and "1_000_000"; must be a non-negative integer.
std::size_t parse_count(std::string_view text);

} // namespace lwdip::cli
