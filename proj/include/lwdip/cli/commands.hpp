#pragma once

#include "lwdip/cli/config.hpp"
#include "lwdip/floquet/floquet.hpp"
#include "lwdip/sim/dipole_sim.hpp"
#include "lwdip/spectra/spectra.hpp"

#include <cstddef>
#include <exception>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace lwdip::cli {

/// Reading or writing a file failed.
class IoError : public Error {
public:
    using Error::Error;
};

enum ExitCode : int {
    exit_ok = 0,
    exit_validation_failed = 1,
    exit_config_error = 2,
    exit_io_error = 3,
    exit_physics_error = 4,
};

int exit_code_for(const std::exception& e);

/// Command-line values that take precedence over the config file.
struct Overrides {
    std::optional<std::size_t> steps;
    std::optional<std::size_t> stride;
    std::optional<std::string> out_dir;
    std::optional<unsigned> threads;
};

void apply_overrides(RunConfig& cfg, const Overrides& o);

/// Runs the simulation and writes timeseries.csv and run_meta.toml into out_dir.
sim::SimulationResult cmd_simulate(const RunConfig& cfg, const std::filesystem::path& out_dir, std::ostream& log);

struct SpectrumRequest {
    std::filesystem::path input;
    std::filesystem::path out_dir;
    std::optional<std::string> column;  // overrides the config's [spectrum] column
    bool floquet_lines = false;         // also honoured when the config asks for it
};

struct SpectrumOutcome {
    spectra::SpectrumResult spectrum;
    std::optional<spectra::MatchReport> match;
};

/// Spectrum of one time-series column; writes spectrum.csv, peaks.csv and,
/// with Floquet lines requested, floquet_match.txt. A config is needed for
/// the normalized axis and for Floquet lines.
SpectrumOutcome cmd_spectrum(const SpectrumRequest& req, const std::optional<RunConfig>& cfg, std::ostream& log);

/// Floquet lines near omega0 for the config's drive, or the two normal modes
/// when the config has no drive.
std::vector<double> floquet_lines_for(const RunConfig& cfg);

/// Sweep over cfg.floquet.r_grid (the drive's own r when empty); writes
/// floquet_sweep.csv and floquet_curves.csv.
floquet::SweepResult cmd_floquet(const RunConfig& cfg, const std::filesystem::path& out_dir, std::ostream& log);

struct ValidationRow {
    std::string label;
    bool pass = false;
};

/// Built-in oracle checks. Prints one row per check and returns them.
std::vector<ValidationRow> run_validation(std::ostream& os);
/// 0 when every check passes, 1 otherwise.
int cmd_validate(std::ostream& os);

} // namespace lwdip::cli
