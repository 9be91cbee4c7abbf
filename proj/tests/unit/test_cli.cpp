#include "catch_amalgamated.hpp"

#include "lwdip/cli/commands.hpp"
#include "lwdip/cli/config.hpp"
#include "lwdip/cli/toml_lite.hpp"
#include "lwdip/cli/units.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

using namespace lwdip;
using namespace lwdip::cli;
using Catch::Approx;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = 3.14159265358979323846;

fs::path source_dir() { return fs::path(LWDIP_SOURCE_DIR); }

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("lwdip_test_cli_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const char* kPair = R"(
[dipole.1]
q = "10 e"
y0 = "1 nm"
omega0 = "200 THz"
position = ["0 nm", "0 nm", "0 nm"]
polarization = [0, 1, 0]
y_init = "1 nm"

[dipole.2]
q = "10 e"
y0 = "1 nm"
omega0 = "200 THz"
position = ["50 nm", "0 nm", "0 nm"]
polarization = [0, 1, 0]

[simulation]
dt = "10 as"
steps = 1000
stride = 10
)";

int line_of_error(const std::string& text) {
    try {
        parse_config_text(text);
    } catch (const ConfigError& e) {
        return e.line();
    }
    return -1;
}

} // namespace

TEST_CASE("TOML subset parser", "[cli][toml]") {
    const auto doc = toml::parse("top = 1\n[a.b]\ns = \"x\\ty\" # c\nlit = 'raw\\n'\nn = 1_000\nf = -2.5e3\n"
                                 "b = true\narr = [1, \"two\", [3]]\nt = { value = \"5 GHz\", angular = true }\n");
    REQUIRE(doc.entries.size() == 8);
    CHECK(doc.entries[0].section.empty());
    CHECK(doc.entries[1].section == "a.b");
    CHECK(doc.entries[1].value.as_string() == "x\ty");
    CHECK(doc.entries[2].value.as_string() == "raw\\n");
    CHECK(doc.entries[3].value.as_number() == 1000.0);
    CHECK(doc.entries[3].value.integer_literal);
    CHECK(doc.entries[4].value.as_number() == -2500.0);
    CHECK_FALSE(doc.entries[4].value.integer_literal);
    CHECK(doc.entries[5].value.as_bool());
    CHECK(doc.entries[6].value.as_array().size() == 3);
    CHECK(doc.entries[7].value.as_table().size() == 2);
    CHECK(doc.entries[7].line == 9);
}

TEST_CASE("TOML syntax errors carry the line", "[cli][toml][errors]") {
    auto line = [](const char* text) {
        try {
            toml::parse(text);
        } catch (const ConfigSyntaxError& e) {
            return e.line();
        }
        return -1;
    };
    CHECK(line("a = 1\nb = \n") == 2);
    CHECK(line("a = 1\na = 2\n") == 2);
    CHECK(line("[s]\n[s]\n") == 2);
    CHECK(line("x = \"open\n") == 1);
    CHECK(line("x = 1__0\n") == 1);
    CHECK(line("\n\nx = [1, 2\n") == 3);
    CHECK(line("[bad\n") == 1);
}

TEST_CASE("units", "[cli][units]") {
    CHECK(parse_quantity("50 nm", Dimension::length) == Approx(50e-9));
    CHECK(parse_quantity("10as", Dimension::time) == Approx(1e-17));
    CHECK(parse_quantity("200 THz", Dimension::frequency) == Approx(2 * kPi * 200e12));
    CHECK(parse_quantity("200 THz", Dimension::frequency, {}, true) == Approx(200e12));
    CHECK(parse_quantity("3 rad/s", Dimension::frequency) == 3.0);
    CHECK(parse_quantity("10 e", Dimension::charge) == Approx(1.602176634e-18));
    CHECK(parse_quantity("0.01 c", Dimension::velocity) == Approx(2997924.58));
    const UnitContext ctx{50e-9, 1.7e12};
    CHECK(parse_quantity("0.1 R0", Dimension::length, ctx) == Approx(5e-9));
    CHECK(parse_quantity("5 g", Dimension::frequency, ctx) == Approx(8.5e12));
    CHECK_THROWS_AS(parse_quantity("0.1 R0", Dimension::length), UnitError);
    CHECK_THROWS_AS(parse_quantity("5", Dimension::length), UnitError);
    CHECK_THROWS_AS(parse_quantity("5 furlong", Dimension::length), UnitError);
    CHECK_THROWS_AS(parse_quantity("5 ns", Dimension::length), UnitError);
    CHECK(std::string(si_unit(Dimension::frequency)) == "rad/s");
}

TEST_CASE("shipped drive configs", "[cli][config]") {
    struct Case {
        const char* file;
        double r, wM_over_g;
    };
    for (const Case& c : {Case{"fig3.toml", 0.1, 1.0}, Case{"fig4.toml", 0.1, 5.0}, Case{"fig5.toml", 0.35, 5.0}}) {
        INFO(c.file);
        const auto cfg = parse_config(source_dir() / "configs" / c.file);
        const auto d = cfg.drive_spec();
        CHECK(d.r == Approx(c.r).epsilon(1e-14));
        CHECK(d.omega_M / cfg.g == Approx(c.wM_over_g).epsilon(1e-14));
        CHECK(cfg.g / 21.48e9 == Approx(79.7).epsilon(0.025));
        REQUIRE(cfg.driven_dipole.has_value());
        CHECK(*cfg.driven_dipole == 1);
        CHECK(cfg.simulation.n_steps == 10'000'000);
        CHECK(cfg.separation == Approx(50e-9));
    }
    for (const char* f : {"static.toml", "single.toml"}) CHECK_NOTHROW(parse_config(source_dir() / "configs" / f));
}

TEST_CASE("config errors", "[cli][config][errors]") {
    CHECK_THROWS_AS(parse_config("/nonexistent/lwdip.toml"), MissingFileError);
    CHECK(line_of_error(std::string(kPair) + "bogus = 3\n") == 21);
    CHECK(line_of_error(std::string(kPair) + "[weird]\n") == 21);
    CHECK_THROWS_WITH(parse_config_text(std::string(kPair) + "bogus = 3\n", "x.toml"),
                      Catch::Matchers::ContainsSubstring("x.toml:21") &&
                          Catch::Matchers::ContainsSubstring("bogus"));
    std::string no_unit = kPair;
    no_unit.replace(no_unit.find("\"10 as\""), 7, "1e-17");
    CHECK_THROWS_AS(parse_config_text(no_unit), ConfigError);
    std::string big_dt = kPair;
    big_dt.replace(big_dt.find("\"10 as\""), 7, "\"1 fs\"");
    CHECK_THROWS_AS(parse_config_text(big_dt), ConfigInvariantError);
}

TEST_CASE("run metadata parses back to the same config", "[cli][config]") {
    const auto cfg = parse_config(source_dir() / "configs" / "fig4.toml");
    std::ostringstream a;
    write_run_meta(a, cfg);
    const auto back = parse_config_text(a.str());
    std::ostringstream b;
    write_run_meta(b, back);
    CHECK(a.str() == b.str());
    CHECK(back.drive_spec().r == cfg.drive_spec().r);
    CHECK(back.drive_spec().omega_M == cfg.drive_spec().omega_M);
    CHECK(back.simulation.dt == cfg.simulation.dt);
    CHECK(back.simulation.dipoles[0].params.omega0 == cfg.simulation.dipoles[0].params.omega0);
}

TEST_CASE("ranges and counts", "[cli]") {
    const auto r = parse_range("0:0.8:0.01");
    CHECK(r.size() == 81);
    CHECK(r.back() == Approx(0.8));
    CHECK(parse_range("0.35") == std::vector<double>{0.35});
    CHECK_THROWS_AS(parse_range("1:0:0.1"), ConfigError);
    CHECK(parse_count("1e6") == 1'000'000);
    CHECK(parse_count("1_000") == 1000);
    CHECK_THROWS_AS(parse_count("1.5"), ConfigError);
    CHECK_THROWS_AS(parse_count("-3"), ConfigError);
}

TEST_CASE("exit codes", "[cli]") {
    CHECK(exit_code_for(UnitError("x")) == exit_config_error);
    CHECK(exit_code_for(MissingFileError("x")) == exit_config_error);
    CHECK(exit_code_for(IoError("x")) == exit_io_error);
    CHECK(exit_code_for(DomainError("x")) == exit_physics_error);
}

TEST_CASE("simulate then spectrum", "[cli][commands]") {
    auto cfg = parse_config_text(kPair);
    apply_overrides(cfg, Overrides{20000, 10, std::nullopt, 1});
    const auto dir = scratch("run");
    std::ostringstream log;
    const auto res = cmd_simulate(cfg, dir, log);
    CHECK(res.times.size() == 2001);
    CHECK(fs::exists(dir / "timeseries.csv"));
    REQUIRE(fs::exists(dir / "run_meta.toml"));

    // run_meta.toml reproduces itself
    const auto again = parse_config(dir / "run_meta.toml");
    std::ostringstream meta;
    write_run_meta(meta, again);
    CHECK(meta.str() == slurp(dir / "run_meta.toml"));
    const auto dir2 = scratch("rerun");
    cmd_simulate(again, dir2, log);
    CHECK(slurp(dir2 / "timeseries.csv") == slurp(dir / "timeseries.csv"));
    fs::remove_all(dir2);

    const auto out = cmd_spectrum({dir / "timeseries.csv", dir, std::string("d_2"), true}, cfg, log);
    CHECK(fs::exists(dir / "spectrum.csv"));
    CHECK(fs::exists(dir / "peaks.csv"));
    CHECK(fs::exists(dir / "floquet_match.txt"));
    CHECK(out.match.has_value());
    CHECK(out.spectrum.n_samples == 2001);
    CHECK(out.spectrum.bin_width == Approx(2 * kPi / (1e-16 * 2001)));

    CHECK_THROWS_AS(cmd_spectrum({dir / "timeseries.csv", dir, std::string("d_9"), false}, cfg, log), IoError);
    CHECK_THROWS_AS(cmd_spectrum({dir / "missing.csv", dir, std::nullopt, false}, cfg, log), IoError);
    fs::remove_all(dir);
}

TEST_CASE("floquet command writes both tables", "[cli][commands]") {
    auto cfg = parse_config(source_dir() / "configs" / "fig3.toml");
    cfg.floquet.r_grid = {0.0, 0.1};
    const auto dir = scratch("floquet");
    std::ostringstream log;
    const auto sw = cmd_floquet(cfg, dir, log);
    CHECK(sw.points.size() == 2);
    CHECK(fs::exists(dir / "floquet_sweep.csv"));
    CHECK(fs::exists(dir / "floquet_curves.csv"));
    const auto lines = floquet_lines_for(cfg);
    CHECK(lines.size() >= 6);
    fs::remove_all(dir);
}

TEST_CASE("built-in validation passes", "[cli][validate]") {
    std::ostringstream os;
    CHECK(cmd_validate(os) == 0);
    const auto rows = run_validation(os);
    CHECK(rows.size() == 7);
    CHECK(os.str().find("FAIL") == std::string::npos);
}
