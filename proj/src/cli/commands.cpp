#include "lwdip/cli/commands.hpp"

#include "lwdip/core/constants.hpp"
#include "lwdip/core/csv.hpp"
#include "lwdip/core/parallel.hpp"
#include "lwdip/greens/greens.hpp"
#include "lwdip/lw/fields.hpp"
#include "lwdip/sim/timeseries_io.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>

namespace lwdip::cli {

namespace fs = std::filesystem;

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const ConfigError*>(&e)) return exit_config_error;
    if (dynamic_cast<const IoError*>(&e)) return exit_io_error;
    return exit_physics_error;
}

void apply_overrides(RunConfig& cfg, const Overrides& o) {
    if (o.steps) cfg.simulation.n_steps = *o.steps;
    if (o.stride) {
        if (*o.stride == 0) throw ConfigInvariantError("--stride must be at least 1");
        cfg.simulation.record_stride = *o.stride;
    }
    if (o.out_dir) cfg.output_dir = *o.out_dir;
    if (o.threads) cfg.threads = *o.threads;
}

namespace {

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError(fmt::format("cannot create directory '{}': {}", dir.string(), ec.message()));
}

std::ofstream open_out(const fs::path& p) {
    std::ofstream out(p);
    if (!out) throw IoError(fmt::format("cannot open '{}' for writing", p.string()));
    out.exceptions(std::ios::badbit | std::ios::failbit);
    return out;
}

template <class Fn>
void write_file(const fs::path& p, Fn&& fn) {
    try {
        std::ofstream out = open_out(p);
        fn(out);
    } catch (const std::ios_base::failure& e) {
        throw IoError(fmt::format("writing '{}' failed: {}", p.string(), e.what()));
    }
}

} // namespace

sim::SimulationResult cmd_simulate(const RunConfig& cfg, const fs::path& out_dir, std::ostream& log) {
    if (cfg.simulation.n_steps == 0) {
        throw ConfigInvariantError("[simulation] steps must be positive (set it in the config or with --steps)");
    }
    ensure_dir(out_dir);
    log << fmt::format("simulating {} dipole(s): {} steps of {:.3g} s, recording every {}\n",
                       cfg.simulation.dipoles.size(), cfg.simulation.n_steps, cfg.simulation.dt,
                       cfg.simulation.record_stride);
    sim::SimulationResult result = sim::run_simulation(cfg.simulation);
    write_file(out_dir / "timeseries.csv", [&](std::ostream& os) { sim::write_timeseries_csv(os, result); });
    write_file(out_dir / "run_meta.toml", [&](std::ostream& os) { write_run_meta(os, cfg); });
    log << fmt::format("wrote {} records to {}\n", result.times.size(), (out_dir / "timeseries.csv").string());
    return result;
}

std::vector<double> floquet_lines_for(const RunConfig& cfg) {
    if (!(cfg.g > 0.0)) throw DomainError("Floquet lines need two coupled dipoles");
    const floquet::CoupledHOParams p = cfg.coupled_params();
    if (!cfg.driven_dipole) {
        const auto nm = floquet::normal_modes(p);
        return {nm.omega_minus, nm.omega_plus};
    }
    floquet::QuasienergyOptions opts;
    opts.weight_threshold = cfg.floquet.weight_threshold;
    opts.window_halfwidth = cfg.floquet.window;
    const auto spec = floquet::quasienergies(floquet::make_problem(p, cfg.drive_spec(), cfg.floquet.L), opts);
    std::vector<double> lines;
    for (const auto& ln : spec.lines_near_omega0) lines.push_back(ln.omega);
    return lines;
}

SpectrumOutcome cmd_spectrum(const SpectrumRequest& req, const std::optional<RunConfig>& cfg, std::ostream& log) {
    std::ifstream in(req.input);
    if (!in) throw IoError(fmt::format("cannot open time series '{}'", req.input.string()));
    csv::Table table;
    try {
        table = csv::read_table(in);
    } catch (const std::exception& e) {
        throw IoError(fmt::format("'{}': {}", req.input.string(), e.what()));
    }
    const std::string column = req.column ? *req.column : (cfg ? cfg->spectrum.column : std::string("d_2"));
    const std::vector<double>* t = nullptr;
    const std::vector<double>* x = nullptr;
    try {
        t = &table.column("t");
        x = &table.column(column);
    } catch (const std::out_of_range&) {
        throw IoError(fmt::format("'{}' has no column 't' or '{}'", req.input.string(), column));
    }
    if (t->size() < 2) throw IoError(fmt::format("'{}' holds fewer than two records", req.input.string()));
    const double dt_eff = (t->back() - t->front()) / static_cast<double>(t->size() - 1);

    std::optional<spectra::AxisScale> scale;
    if (cfg) scale = spectra::AxisScale{cfg->omega0(), cfg->drive_spec().omega_M};
    const double prominence = cfg ? cfg->spectrum.prominence : spectra::kDefaultProminence;

    SpectrumOutcome out;
    out.spectrum = spectra::find_peaks(spectra::windowed_fft(*x, dt_eff, scale), prominence);

    ensure_dir(req.out_dir);
    write_file(req.out_dir / "spectrum.csv", [&](std::ostream& os) { spectra::write_spectrum_csv(os, out.spectrum); });
    write_file(req.out_dir / "peaks.csv", [&](std::ostream& os) { spectra::write_peaks_csv(os, out.spectrum); });
    log << fmt::format("{} peaks in column {}, bin width {:.6g} rad/s\n", out.spectrum.peaks.size(), column,
                       out.spectrum.bin_width);

    if (req.floquet_lines || (cfg && cfg->spectrum.floquet_lines)) {
        if (!cfg) throw ConfigInvariantError("Floquet lines need --config");
        const auto lines = floquet_lines_for(*cfg);
        out.match = spectra::compare_to_floquet(out.spectrum, lines, cfg->spectrum.tolerance_bins);
        write_file(req.out_dir / "floquet_match.txt",
                   [&](std::ostream& os) { spectra::write_match_report(os, *out.match); });
        log << "Floquet match: " << (out.match->pass ? "PASS" : "FAIL") << '\n';
    }
    return out;
}

floquet::SweepResult cmd_floquet(const RunConfig& cfg, const fs::path& out_dir, std::ostream& log) {
    std::vector<double> grid = cfg.floquet.r_grid;
    if (grid.empty()) grid.push_back(cfg.drive_spec().r);
    floquet::QuasienergyOptions opts;
    opts.weight_threshold = cfg.floquet.weight_threshold;
    opts.window_halfwidth = cfg.floquet.window;
    const double omega_M = cfg.drive_spec().omega_M;
    auto result = floquet::sweep(cfg.coupled_params(), grid, omega_M, cfg.floquet.L, opts,
                                 cfg.threads);
    ensure_dir(out_dir);
    write_file(out_dir / "floquet_sweep.csv", [&](std::ostream& os) { floquet::write_sweep_csv(os, result); });
    write_file(out_dir / "floquet_curves.csv", [&](std::ostream& os) { floquet::write_curves_csv(os, result); });
    std::size_t failed = 0;
    for (const auto& pt : result.points) {
        if (!pt.spectrum) {
            ++failed;
            log << fmt::format("r = {}: {}\n", pt.r, pt.error);
        } else if (!pt.spectrum->converged) {
            log << fmt::format("r = {}: truncation not converged (shift {:.3g} rad/s)\n", pt.r,
                               pt.spectrum->convergence_shift);
        }
    }
    log << fmt::format("swept {} points ({} failed)\n", result.points.size(), failed);
    return result;
}

namespace {

// Retarded time of a charge in uniform motion: with p = obs - r(t) the delay
// tau = t - t_r solves (c^2 - v^2) tau^2 - 2 (p.v) tau - |p|^2 = 0.
double uniform_motion_delay(const Vec3& p, const Vec3& v) {
    const double c = constants::c;
    const double a = c * c - dot(v, v);
    const double b = dot(p, v);
    const double root = std::sqrt(b * b + a * dot(p, p));
    return b >= 0.0 ? (b + root) / a : dot(p, p) / (root - b);
}

} // namespace

std::vector<ValidationRow> run_validation(std::ostream& os) {
    using constants::pi;
    std::vector<ValidationRow> rows;
    auto report = [&](std::string text, bool pass) {
        os << text << "  " << (pass ? "PASS" : "FAIL") << '\n';
        rows.push_back({std::move(text), pass});
    };

    const DipoleParams p = derive_dipole_params(10.0 * constants::e, 1e-9, 2.0 * pi * 200e12);
    const double R0 = 50e-9;

    const double gamma0_ghz = p.gamma0 / 1e9;
    report(fmt::format("gamma0 = {:.2f} GHz ± 0.1%", gamma0_ghz), std::abs(gamma0_ghz / 21.48 - 1.0) <= 1e-3);

    const Vec3 d{0.0, p.d0, 0.0};
    const auto rates = greens::coupling_rates(d, d, Vec3{}, Vec3{R0, 0.0, 0.0}, p.omega0);
    const double ratio = rates.g12 / p.gamma0;
    report(fmt::format("g12/gamma0 = {:.1f} ± 2.5%", ratio), std::abs(ratio / 79.7 - 1.0) <= 0.025);

    const double near = greens::near_field_coupling(p.d0, p.d0, R0);
    const double excess = near / rates.g12 - 1.0;
    report(fmt::format("near-field excess over full G = {:.2f}% in [1%, 3%]", 100.0 * excess),
           excess >= 0.01 && excess <= 0.03);

    const floquet::CoupledHOParams hp{p.omega0, rates.g12};
    double worst_g0 = 0.0;
    for (double r : {0.1, 0.35, 0.5, 0.7}) {
        const double quad = floquet::fourier_coupling(hp, {r, hp.g}, 0).real();
        worst_g0 = std::max(worst_g0, std::abs(quad / floquet::renormalized_coupling(hp.g, r) - 1.0));
    }
    report(fmt::format("g_0 quadrature vs closed form, max rel. dev. = {:.1e} < 1e-10", worst_g0), worst_g0 < 1e-10);

    const double wM = hp.g;
    const auto spec = floquet::quasienergies(floquet::make_problem(hp, {0.0, wM}));
    const auto nm = floquet::normal_modes(hp);
    double worst_q = 0.0;
    for (double expect : {nm.omega_plus, nm.omega_minus, -nm.omega_plus, -nm.omega_minus}) {
        const double f = floquet::fold(expect, wM);
        double best = std::numeric_limits<double>::infinity();
        for (double q : spec.quasienergies) {
            const double dd = std::abs(q - f);
            best = std::min(best, std::min(dd, wM - dd));
        }
        worst_q = std::max(worst_q, best / p.omega0);
    }
    report(fmt::format("static quasienergies, max dev./omega0 = {:.1e} < 1e-12", worst_q), worst_q < 1e-12);

    {
        const double dt = 1e-17;
        lw::TrajectoryHistory h(constants::e, 0.0, dt, Vec3{});
        for (int k = 0; k <= 2000; ++k) h.append(Vec3{}, Vec3{}, Vec3{});
        const Vec3 obs{1e-6, 3e-7, -2e-7};
        const auto f = lw::lw_fields(obs, 2000 * dt, h);
        const double r = norm(obs);
        const Vec3 ref = (constants::e / (4.0 * pi * constants::eps0 * r * r * r)) * obs;
        const double err = norm(f.E() - ref) / norm(ref);
        report(fmt::format("static charge vs Coulomb, rel. dev. = {:.1e} < 1e-12", err), err < 1e-12);
    }
    {
        const double dt = 1e-17;
        const Vec3 v{0.004 * constants::c, 0.002 * constants::c, 0.0};
        const Vec3 r0{-1e-8, 0.0, 0.0};
        lw::TrajectoryHistory h(constants::e, 0.0, dt, r0);
        const int n = 2000;
        for (int k = 0; k <= n; ++k) h.append(r0 + (k * dt) * v, v, Vec3{});
        const Vec3 obs{4e-7, 5e-7, 1e-7};
        const double t = n * dt;
        const double tr = lw::retarded_time(obs, t, h);
        const double tau_ref = uniform_motion_delay(obs - (r0 + t * v), v);
        const double err = std::abs((t - tr) - tau_ref) / tau_ref;
        report(fmt::format("uniform-motion retarded time, rel. dev. = {:.1e} < 1e-12", err), err < 1e-12);
    }
    return rows;
}

int cmd_validate(std::ostream& os) {
    const auto rows = run_validation(os);
    const bool ok = std::all_of(rows.begin(), rows.end(), [](const ValidationRow& r) { return r.pass; });
    os << (ok ? "all checks passed" : "validation FAILED") << '\n';
    return ok ? exit_ok : exit_validation_failed;
}

} // namespace lwdip::cli
