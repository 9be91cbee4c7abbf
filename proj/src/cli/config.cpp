#include "lwdip/cli/config.hpp"

#include "lwdip/cli/toml_lite.hpp"
#include "lwdip/cli/units.hpp"
#include "lwdip/core/csv.hpp"
#include "lwdip/greens/greens.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

namespace lwdip::cli {

namespace {

using toml::Entry;
using toml::Value;

const std::map<std::string, std::set<std::string>>& allowed_keys() {
    static const std::map<std::string, std::set<std::string>> keys{
        {"meta", {"version", "generated_by"}},
        {"dipole", {"q", "y0", "omega0", "position", "polarization", "y_init", "ydot_init"}},
        {"drive", {"dipole", "axis", "R0", "R_M", "omega_M", "phase"}},
        {"simulation", {"dt", "steps", "stride", "field_at_charges", "history", "output_dir", "threads"}},
        {"spectrum", {"column", "prominence", "tolerance_bins", "floquet_lines"}},
        {"floquet", {"r_grid", "L", "weight_threshold", "window"}},
    };
    return keys;
}

std::string section_kind(const std::string& name) {
    return name.starts_with("dipole.") ? "dipole" : name;
}

class Reader {
public:
    Reader(const toml::Document& doc, std::string origin) : doc_(doc), origin_(std::move(origin)) {}

    [[noreturn]] void invariant(const std::string& msg, int line = 0) const {
        if (line > 0) throw ConfigInvariantError(fmt::format("{}:{}: {}", origin_, line, msg), line);
        throw ConfigInvariantError(fmt::format("{}: {}", origin_, msg), 0);
    }

    void check_structure() const {
        const auto& allowed = allowed_keys();
        for (const auto& h : doc_.sections) {
            if (!allowed.contains(section_kind(h.name))) {
                throw ConfigSyntaxError(fmt::format("{}:{}: unknown section [{}]", origin_, h.line, h.name), h.line);
            }
        }
        for (const Entry& e : doc_.entries) {
            if (e.section.empty()) {
                throw ConfigSyntaxError(
                    fmt::format("{}:{}: key '{}' appears before any section header", origin_, e.line, e.key), e.line);
            }
            if (!allowed.at(section_kind(e.section)).contains(e.key)) {
                throw ConfigSyntaxError(
                    fmt::format("{}:{}: unknown key '{}' in [{}]", origin_, e.line, e.key, e.section), e.line);
            }
        }
    }

    bool has_section(const std::string& name) const {
        return std::any_of(doc_.sections.begin(), doc_.sections.end(),
                           [&](const toml::SectionHeader& h) { return h.name == name; });
    }

    int section_line(const std::string& name) const {
        for (const auto& h : doc_.sections) {
            if (h.name == name) return h.line;
        }
        return 0;
    }

    const Entry* find(const std::string& section, const std::string& key) const {
        for (const Entry& e : doc_.entries) {
            if (e.section == section && e.key == key) return &e;
        }
        return nullptr;
    }

    const Entry& require(const std::string& section, const std::string& key) const {
        if (const Entry* e = find(section, key)) return *e;
        invariant(fmt::format("[{}] is missing required key '{}'", section, key), section_line(section));
    }

    [[noreturn]] void type_error(const Entry& e, const char* expected) const {
        throw ConfigSyntaxError(
            fmt::format("{}:{}: [{}] {} must be {}", origin_, e.line, e.section, e.key, expected), e.line);
    }

    double quantity(const Entry& e, Dimension dim, const UnitContext& ctx) const {
        return quantity_value(e, e.value, dim, ctx);
    }

    double quantity_value(const Entry& e, const Value& v, Dimension dim, const UnitContext& ctx) const {
        std::string text;
        bool angular = false;
        if (v.is_string()) {
            text = v.as_string();
        } else if (v.is_table()) {
            bool have_value = false;
            for (const auto& [k, item] : v.as_table()) {
                if (k == "value" && item.is_string()) {
                    text = item.as_string();
                    have_value = true;
                } else if (k == "angular" && item.is_bool()) {
                    angular = item.as_bool();
                } else {
                    type_error(e, "a table of the form { value = \"<number> <unit>\", angular = <bool> }");
                }
            }
            if (!have_value) type_error(e, "a table with a 'value' string");
            if (angular && dim != Dimension::frequency) type_error(e, "a non-frequency quantity without 'angular'");
        } else if (v.is_number()) {
            throw UnitError(fmt::format("{}:{}: [{}] {} = {} needs an explicit unit, e.g. \"{} {}\"", origin_, e.line,
                                        e.section, e.key, v.as_number(), v.as_number(), si_unit(dim)),
                            e.line);
        } else {
            type_error(e, "a quantity string such as \"50 nm\"");
        }
        try {
            return parse_quantity(text, dim, ctx, angular);
        } catch (const UnitError& err) {
            throw UnitError(fmt::format("{}:{}: [{}] {}: {}", origin_, e.line, e.section, e.key, err.what()), e.line);
        }
    }

    Vec3 quantity_vec(const Entry& e, Dimension dim, const UnitContext& ctx) const {
        if (!e.value.is_array() || e.value.as_array().size() != 3) type_error(e, "an array of three quantities");
        const auto& a = e.value.as_array();
        return {quantity_value(e, a[0], dim, ctx), quantity_value(e, a[1], dim, ctx),
                quantity_value(e, a[2], dim, ctx)};
    }

    Vec3 number_vec(const Entry& e) const {
        if (!e.value.is_array() || e.value.as_array().size() != 3) type_error(e, "an array of three numbers");
        const auto& a = e.value.as_array();
        for (const Value& x : a) {
            if (!x.is_number()) type_error(e, "an array of three numbers");
        }
        return {a[0].as_number(), a[1].as_number(), a[2].as_number()};
    }

    double number(const Entry& e) const {
        if (!e.value.is_number()) type_error(e, "a number");
        return e.value.as_number();
    }

    std::size_t count(const Entry& e) const {
        if (!e.value.is_number()) type_error(e, "a non-negative integer");
        const double v = e.value.as_number();
        if (!(v >= 0.0) || v != std::floor(v) || v > 9.0e15) type_error(e, "a non-negative integer");
        return static_cast<std::size_t>(v);
    }

    bool boolean(const Entry& e) const {
        if (!e.value.is_bool()) type_error(e, "true or false");
        return e.value.as_bool();
    }

    const std::string& string(const Entry& e) const {
        if (!e.value.is_string()) type_error(e, "a string");
        return e.value.as_string();
    }

    const std::string& origin() const { return origin_; }

private:
    const toml::Document& doc_;
    std::string origin_;
};

Vec3 normalized_or_throw(const Reader& rd, const Vec3& v, const std::string& what, int line) {
    const double n = norm(v);
    if (!(n > 0.0)) rd.invariant(what + " must be non-zero", line);
    if (std::abs(n - 1.0) > 1e-12) rd.invariant(what + " must be a unit vector", line);
    return v;
}

} // namespace

floquet::DriveSpec RunConfig::drive_spec() const {
    if (driven_dipole) {
        const auto& d = *simulation.dipoles[*driven_dipole].drive;
        return {d.R_M / d.R0, d.omega_M};
    }
    return {0.0, g};
}

floquet::CoupledHOParams RunConfig::coupled_params() const {
    return {omega0(), g};
}

std::vector<double> parse_range(std::string_view text) {
    auto num = [&](std::string_view s) {
        while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
        while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
        double v = 0.0;
        const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc{} || end != s.data() + s.size() || s.empty()) {
            throw ConfigSyntaxError(fmt::format("invalid number '{}' in range '{}'", s, text));
        }
        return v;
    };
    const auto c1 = text.find(':');
    if (c1 == std::string_view::npos) return {num(text)};
    const auto c2 = text.find(':', c1 + 1);
    if (c2 == std::string_view::npos) throw ConfigSyntaxError(fmt::format("range '{}' must be a:b:step", text));
    const double a = num(text.substr(0, c1));
    const double b = num(text.substr(c1 + 1, c2 - c1 - 1));
    const double step = num(text.substr(c2 + 1));
    if (!(step > 0.0) || b < a) throw ConfigInvariantError(fmt::format("range '{}' needs step > 0 and b >= a", text));
    const auto n = static_cast<std::size_t>(std::floor((b - a) / step + 1e-6)) + 1;
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = a + static_cast<double>(i) * step;
    return out;
}

std::size_t parse_count(std::string_view text) {
    std::string clean;
    for (char c : text) {
        if (c != '_') clean.push_back(c);
    }
    double v = 0.0;
    const auto [end, ec] = std::from_chars(clean.data(), clean.data() + clean.size(), v);
    if (ec != std::errc{} || end != clean.data() + clean.size() || !(v >= 0.0) || v != std::floor(v) || v > 9.0e15) {
        throw ConfigSyntaxError(fmt::format("'{}' is not a non-negative integer", text));
    }
    return static_cast<std::size_t>(v);
}

RunConfig parse_config_text(std::string_view text, const std::string& origin) {
    toml::Document doc;
    try {
        doc = toml::parse(text);
    } catch (const ConfigSyntaxError& e) {
        throw ConfigSyntaxError(fmt::format("{}:{}", origin, e.what()), e.line());
    }
    Reader rd(doc, origin);
    rd.check_structure();

    RunConfig cfg;
    auto& sim = cfg.simulation;

    // Dipoles: [dipole.1], [dipole.2], ... numbered without gaps.
    std::size_t n_dipoles = 0;
    while (rd.has_section(fmt::format("dipole.{}", n_dipoles + 1))) ++n_dipoles;
    for (const auto& h : doc.sections) {
        if (!h.name.starts_with("dipole.")) continue;
        std::size_t idx = 0;
        const std::string_view tail = std::string_view(h.name).substr(7);
        const auto [end, ec] = std::from_chars(tail.data(), tail.data() + tail.size(), idx);
        if (ec != std::errc{} || end != tail.data() + tail.size() || idx < 1 || idx > n_dipoles) {
            rd.invariant(fmt::format("dipole sections must be numbered 1..N without gaps, found [{}]", h.name), h.line);
        }
    }
    if (n_dipoles == 0) rd.invariant("at least one [dipole.N] section is required");

    const UnitContext plain;
    for (std::size_t n = 0; n < n_dipoles; ++n) {
        const std::string sec = fmt::format("dipole.{}", n + 1);
        sim::DipoleInit d;
        const double q = rd.quantity(rd.require(sec, "q"), Dimension::charge, plain);
        const double y0 = rd.quantity(rd.require(sec, "y0"), Dimension::length, plain);
        const double w0 = rd.quantity(rd.require(sec, "omega0"), Dimension::frequency, plain);
        try {
            d.params = derive_dipole_params(q, y0, w0);
        } catch (const DomainError& e) {
            rd.invariant(fmt::format("[{}]: {}", sec, e.what()), rd.section_line(sec));
        }
        if (const Entry* e = rd.find(sec, "position")) d.position = rd.quantity_vec(*e, Dimension::length, plain);
        if (const Entry* e = rd.find(sec, "polarization")) {
            d.polarization = normalized_or_throw(rd, rd.number_vec(*e), "[" + sec + "] polarization", e->line);
        }
        if (const Entry* e = rd.find(sec, "y_init")) d.y_init = rd.quantity(*e, Dimension::length, plain);
        if (const Entry* e = rd.find(sec, "ydot_init")) d.ydot_init = rd.quantity(*e, Dimension::velocity, plain);
        sim.dipoles.push_back(d);
    }

    // Drive geometry first: R0 defines the "R0" unit and, with the dipoles, the "g" unit.
    UnitContext ctx;
    const bool driven = rd.has_section("drive");
    sim::MechanicalDrive drive;
    if (driven) {
        std::size_t which = 2;
        if (const Entry* e = rd.find("drive", "dipole")) which = rd.count(*e);
        if (which < 1 || which > n_dipoles) {
            rd.invariant(fmt::format("[drive] dipole = {} does not name a dipole", which), rd.section_line("drive"));
        }
        cfg.driven_dipole = which - 1;
        if (const Entry* e = rd.find(fmt::format("dipole.{}", which), "position")) {
            rd.invariant("the driven dipole's position is set by [drive]; remove its 'position' key", e->line);
        }
        if (const Entry* e = rd.find("drive", "axis")) {
            drive.axis = normalized_or_throw(rd, rd.number_vec(*e), "[drive] axis", e->line);
        }
        drive.R0 = rd.quantity(rd.require("drive", "R0"), Dimension::length, plain);
        ctx.R0 = drive.R0;
        sim.dipoles[*cfg.driven_dipole].position = drive.R0 * drive.axis;
    }

    if (n_dipoles >= 2) {
        const auto& a = sim.dipoles[0];
        const auto& b = sim.dipoles[1];
        cfg.separation = norm(b.position - a.position);
        if (!(cfg.separation > 0.0)) rd.invariant("dipoles 1 and 2 sit at the same position");
        const auto rates = greens::coupling_rates(a.params.d0 * a.polarization, b.params.d0 * b.polarization,
                                                  a.position, b.position, a.params.omega0);
        cfg.g = std::abs(rates.g12);
        ctx.g = cfg.g;
    }

    if (driven) {
        drive.R_M = rd.quantity(rd.require("drive", "R_M"), Dimension::length, ctx);
        drive.omega_M = rd.quantity(rd.require("drive", "omega_M"), Dimension::frequency, ctx);
        if (const Entry* e = rd.find("drive", "phase")) drive.phase = rd.number(*e);
        try {
            drive.validate();
        } catch (const DomainError& e) {
            rd.invariant(fmt::format("[drive]: {}", e.what()), rd.section_line("drive"));
        }
        sim.dipoles[*cfg.driven_dipole].drive = drive;
        sim.dipoles[*cfg.driven_dipole].position = Vec3{};
    }

    if (const Entry* e = rd.find("simulation", "dt")) sim.dt = rd.quantity(*e, Dimension::time, ctx);
    if (const Entry* e = rd.find("simulation", "steps")) sim.n_steps = rd.count(*e);
    if (const Entry* e = rd.find("simulation", "stride")) sim.record_stride = rd.count(*e);
    if (const Entry* e = rd.find("simulation", "field_at_charges")) sim.field_at_charges = rd.boolean(*e);
    if (const Entry* e = rd.find("simulation", "history")) {
        const std::string& h = rd.string(*e);
        if (h == "bounded") sim.history = sim::HistoryMode::bounded;
        else if (h == "full") sim.history = sim::HistoryMode::full;
        else rd.invariant(fmt::format("[simulation] history must be \"bounded\" or \"full\", got \"{}\"", h), e->line);
    }
    if (const Entry* e = rd.find("simulation", "output_dir")) cfg.output_dir = rd.string(*e);
    if (const Entry* e = rd.find("simulation", "threads")) cfg.threads = static_cast<unsigned>(rd.count(*e));

    if (const Entry* e = rd.find("spectrum", "column")) cfg.spectrum.column = rd.string(*e);
    if (const Entry* e = rd.find("spectrum", "prominence")) {
        cfg.spectrum.prominence = rd.number(*e);
        if (!(cfg.spectrum.prominence >= 0.0 && cfg.spectrum.prominence <= 1.0)) {
            rd.invariant("[spectrum] prominence must lie in [0, 1]", e->line);
        }
    }
    if (const Entry* e = rd.find("spectrum", "tolerance_bins")) cfg.spectrum.tolerance_bins = rd.number(*e);
    if (const Entry* e = rd.find("spectrum", "floquet_lines")) cfg.spectrum.floquet_lines = rd.boolean(*e);

    if (const Entry* e = rd.find("floquet", "r_grid")) {
        if (e->value.is_string()) {
            try {
                cfg.floquet.r_grid = parse_range(e->value.as_string());
            } catch (const ConfigError& err) {
                throw ConfigSyntaxError(fmt::format("{}:{}: [floquet] r_grid: {}", rd.origin(), e->line, err.what()),
                                        e->line);
            }
        } else if (e->value.is_array()) {
            for (const Value& v : e->value.as_array()) {
                if (!v.is_number()) rd.type_error(*e, "\"a:b:step\" or an array of numbers");
                cfg.floquet.r_grid.push_back(v.as_number());
            }
        } else {
            rd.type_error(*e, "\"a:b:step\" or an array of numbers");
        }
        for (double r : cfg.floquet.r_grid) {
            if (!(r >= 0.0 && r < 1.0)) rd.invariant(fmt::format("[floquet] r_grid value {} outside [0, 1)", r), e->line);
        }
    }
    if (const Entry* e = rd.find("floquet", "L")) cfg.floquet.L = static_cast<int>(rd.count(*e));
    if (const Entry* e = rd.find("floquet", "weight_threshold")) cfg.floquet.weight_threshold = rd.number(*e);
    if (const Entry* e = rd.find("floquet", "window")) cfg.floquet.window = rd.quantity(*e, Dimension::frequency, ctx);

    try {
        sim.validate();
    } catch (const DomainError& e) {
        rd.invariant(e.what());
    }
    return cfg;
}

RunConfig parse_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw MissingFileError(fmt::format("cannot open config '{}'", path.string()));
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str(), path.string());
}

void write_run_meta(std::ostream& os, const RunConfig& cfg) {
    const auto q = [](double v, const char* unit) { return fmt::format("\"{} {}\"", csv::format_double(v), unit); };
    const auto qvec = [&](const Vec3& v, const char* unit) {
        return fmt::format("[{}, {}, {}]", q(v.x, unit), q(v.y, unit), q(v.z, unit));
    };
    const auto nvec = [](const Vec3& v) {
        return fmt::format("[{}, {}, {}]", csv::format_double(v.x), csv::format_double(v.y), csv::format_double(v.z));
    };
    const auto str = [](const std::string& s) {
        std::string out = "\"";
        for (char c : s) {
            if (c == '"' || c == '\\') out.push_back('\\');
            out.push_back(c);
        }
        return out + "\"";
    };

    os << "# Resolved parameters of this run, in SI units. Parses as a config.\n";
    os << "[meta]\n";
    os << "version = \"" << kSoftwareVersion << "\"\n";
    os << "generated_by = \"lwdip simulate\"\n";

    const auto& sim = cfg.simulation;
    for (std::size_t n = 0; n < sim.dipoles.size(); ++n) {
        const auto& d = sim.dipoles[n];
        os << fmt::format("\n[dipole.{}]\n", n + 1);
        os << "q = " << q(d.params.q, "C") << '\n';
        os << "y0 = " << q(d.params.y0, "m") << '\n';
        os << "omega0 = " << q(d.params.omega0, "rad/s") << '\n';
        if (!(cfg.driven_dipole && *cfg.driven_dipole == n)) os << "position = " << qvec(d.position, "m") << '\n';
        os << "polarization = " << nvec(d.polarization) << '\n';
        os << "y_init = " << q(d.y_init, "m") << '\n';
        os << "ydot_init = " << q(d.ydot_init, "m/s") << '\n';
    }
    if (cfg.driven_dipole) {
        const auto& dr = *sim.dipoles[*cfg.driven_dipole].drive;
        os << "\n[drive]\n";
        os << "dipole = " << *cfg.driven_dipole + 1 << '\n';
        os << "axis = " << nvec(dr.axis) << '\n';
        os << "R0 = " << q(dr.R0, "m") << '\n';
        os << "R_M = " << q(dr.R_M, "m") << '\n';
        os << "omega_M = " << q(dr.omega_M, "rad/s") << '\n';
        os << "phase = " << csv::format_double(dr.phase) << '\n';
    }
    os << "\n[simulation]\n";
    os << "dt = " << q(sim.dt, "s") << '\n';
    os << "steps = " << sim.n_steps << '\n';
    os << "stride = " << sim.record_stride << '\n';
    os << "field_at_charges = " << (sim.field_at_charges ? "true" : "false") << '\n';
    os << "history = \"" << (sim.history == sim::HistoryMode::full ? "full" : "bounded") << "\"\n";
    os << "output_dir = " << str(cfg.output_dir) << '\n';
    os << "threads = " << cfg.threads << '\n';

    os << "\n[spectrum]\n";
    os << "column = " << str(cfg.spectrum.column) << '\n';
    os << "prominence = " << csv::format_double(cfg.spectrum.prominence) << '\n';
    os << "tolerance_bins = " << csv::format_double(cfg.spectrum.tolerance_bins) << '\n';
    os << "floquet_lines = " << (cfg.spectrum.floquet_lines ? "true" : "false") << '\n';

    os << "\n[floquet]\n";
    if (!cfg.floquet.r_grid.empty()) {
        os << "r_grid = [";
        for (std::size_t i = 0; i < cfg.floquet.r_grid.size(); ++i) {
            os << (i ? ", " : "") << csv::format_double(cfg.floquet.r_grid[i]);
        }
        os << "]\n";
    }
    os << "L = " << cfg.floquet.L << '\n';
    os << "weight_threshold = " << csv::format_double(cfg.floquet.weight_threshold) << '\n';
    if (cfg.floquet.window > 0.0) os << "window = " << q(cfg.floquet.window, "rad/s") << '\n';
    os << "\n# derived: separation = " << csv::format_double(cfg.separation) << " m, g = " << csv::format_double(cfg.g)
       << " rad/s\n";
}

} // namespace lwdip::cli
