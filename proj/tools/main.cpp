#include "lwdip/cli/commands.hpp"
#include "lwdip/cli/config.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

namespace {

using namespace lwdip::cli;

struct Options {
    std::string config;
    std::string steps;
    std::size_t stride = 0;
    std::string out;
    unsigned threads = 0;
    std::string input;
    std::string column;
    bool floquet = false;
    std::string r_grid;
    int L = -1;
};

Overrides overrides_from(const Options& o) {
    Overrides ov;
    if (!o.steps.empty()) ov.steps = parse_count(o.steps);
    if (o.stride > 0) ov.stride = o.stride;
    if (!o.out.empty()) ov.out_dir = o.out;
    if (o.threads > 0) ov.threads = o.threads;
    return ov;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Lienard-Wiechert dipole simulator with Floquet and spectral analysis"};
    app.set_version_flag("--version", kSoftwareVersion);
    app.require_subcommand(1);
    Options o;

    auto* simulate = app.add_subcommand("simulate", "run a time-domain simulation");
    simulate->add_option("--config", o.config, "run configuration (TOML)")->required();
    simulate->add_option("--steps", o.steps, "override the step count (accepts 1e6)");
    simulate->add_option("--stride", o.stride, "override the record stride");
    simulate->add_option("--out", o.out, "output directory");

    auto* spectrum = app.add_subcommand("spectrum", "windowed FFT and peaks of a time series");
    spectrum->add_option("--input", o.input, "timeseries.csv from simulate")->required();
    spectrum->add_option("--config", o.config, "run configuration, for axis scaling and Floquet lines");
    spectrum->add_option("--column", o.column, "column to transform (default d_2)");
    spectrum->add_flag("--floquet", o.floquet, "compare peaks with Floquet lines");
    spectrum->add_option("--out", o.out, "output directory");

    auto* floquet = app.add_subcommand("floquet", "Floquet quasienergy sweep");
    floquet->add_option("--config", o.config, "run configuration (TOML)")->required();
    floquet->add_option("--r-grid", o.r_grid, "R_M/R0 values as a:b:step");
    floquet->add_option("--L", o.L, "sideband truncation (default: automatic)");
    floquet->add_option("--threads", o.threads, "worker threads (default: all cores)");
    floquet->add_option("--out", o.out, "output directory");

    app.add_subcommand("validate", "run the built-in oracle checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? exit_ok : exit_config_error;
    }

    try {
        if (app.got_subcommand("validate")) return cmd_validate(std::cout);

        std::optional<RunConfig> cfg;
        if (!o.config.empty()) {
            cfg = parse_config(o.config);
            apply_overrides(*cfg, overrides_from(o));
        }

        if (app.got_subcommand("simulate")) {
            cmd_simulate(*cfg, cfg->output_dir, std::cout);
        } else if (app.got_subcommand("spectrum")) {
            SpectrumRequest req;
            req.input = o.input;
            req.out_dir = !o.out.empty() ? o.out : (cfg ? cfg->output_dir : std::string("."));
            if (!o.column.empty()) req.column = o.column;
            req.floquet_lines = o.floquet;
            const auto outcome = cmd_spectrum(req, cfg, std::cout);
            if (outcome.match && !outcome.match->pass) return exit_validation_failed;
        } else if (app.got_subcommand("floquet")) {
            if (!o.r_grid.empty()) cfg->floquet.r_grid = parse_range(o.r_grid);
            if (o.L >= 0) cfg->floquet.L = o.L;
            cmd_floquet(*cfg, cfg->output_dir, std::cout);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code_for(e);
    }
    return exit_ok;
}
