#include "catch_amalgamated.hpp"

#include "lwdip/core/constants.hpp"
#include "lwdip/core/csv.hpp"
#include "lwdip/core/dipole_params.hpp"
#include "lwdip/core/errors.hpp"
#include "lwdip/core/parallel.hpp"
#include "lwdip/core/vec3.hpp"

#include <atomic>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

using namespace lwdip;
using Catch::Approx;

namespace {

constexpr double kPi = 3.14159265358979323846;
const double kE = 1.602176634e-19;
const double kHbar = 6.62607015e-34 / (2.0 * kPi);

} // namespace

TEST_CASE("reference dipole parameters", "[core][params]") {
    const auto p = derive_dipole_params(10.0 * kE, 1e-9, 2.0 * kPi * 200e12);
    CHECK(p.d0 == Approx(10.0 * kE * 1e-9).epsilon(1e-15));
    CHECK(p.m_eff == Approx(kHbar / (2.0 * 2.0 * kPi * 200e12 * 1e-18)).epsilon(1e-14));
    CHECK(p.m_eff == Approx(4.1958e-32).epsilon(1e-4));
    CHECK(p.gamma0 == Approx(21.48e9).epsilon(1e-3));
}

TEST_CASE("the two decay-rate forms agree through m_eff", "[core][params]") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> q(1.0, 20.0), y(0.2e-9, 5e-9), f(50e12, 800e12);
    for (int i = 0; i < 200; ++i) {
        const auto p = derive_dipole_params(q(rng) * kE, y(rng), 2.0 * kPi * f(rng));
        CHECK(decay_rate_mass_form(p.q, p.m_eff, p.omega0) == Approx(p.gamma0).epsilon(1e-12));
    }
}

TEST_CASE("non-positive inputs are domain errors naming the parameter", "[core][params]") {
    CHECK_THROWS_AS(derive_dipole_params(0.0, 1e-9, 1e15), DomainError);
    CHECK_THROWS_WITH(derive_dipole_params(kE, -1e-9, 1e15), Catch::Matchers::ContainsSubstring("y0"));
    CHECK_THROWS_WITH(derive_dipole_params(kE, 1e-9, 0.0), Catch::Matchers::ContainsSubstring("omega0"));
    CHECK_THROWS_AS(derive_dipole_params(kE, 1e-9, std::nan("")), DomainError);
}

TEST_CASE("hertz to angular", "[core]") {
    CHECK(angular_from_hz(200e12) == Approx(1.2566370614359172e15).epsilon(1e-15));
    CHECK(angular_from_hz(0.0) == 0.0);
}

TEST_CASE("constants", "[core]") {
    CHECK(constants::mu0 * constants::eps0 * constants::c * constants::c == Approx(1.0).epsilon(1e-15));
    CHECK(constants::max_charge_speed == Approx(constants::c / 100.0));
}

TEST_CASE("vector algebra", "[core][vec3]") {
    const Vec3 a{1, 2, 3}, b{-2, 0.5, 4};
    CHECK(dot(a, b) == Approx(-2 + 1 + 12));
    const Vec3 c = cross(a, b);
    CHECK(dot(c, a) == Approx(0.0).margin(1e-14));
    CHECK(dot(c, b) == Approx(0.0).margin(1e-14));
    CHECK(norm(Vec3{3, 4, 0}) == Approx(5.0));
    CHECK(norm(normalized(b)) == Approx(1.0));
    CHECK((a + b - b) == a);
    CHECK((2.0 * a) == Vec3{2, 4, 6});
}

TEST_CASE("csv numbers round-trip exactly", "[core][csv]") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> a(50), b(50);
    for (std::size_t i = 0; i < a.size(); ++i) {
        a[i] = u(rng) * std::pow(10.0, 40.0 * u(rng));
        b[i] = std::nextafter(a[i], 1e300);
    }
    std::stringstream ss;
    csv::write_columns(ss, {"a", "b"}, {&a, &b});
    const auto t = csv::read_table(ss);
    REQUIRE(t.header == std::vector<std::string>{"a", "b"});
    CHECK(t.column("a") == a);
    CHECK(t.column("b") == b);
    CHECK_THROWS_AS(t.column("c"), std::out_of_range);
}

TEST_CASE("csv rejects ragged input", "[core][csv]") {
    std::stringstream ss("x,y\n1,2\n3\n");
    CHECK_THROWS(csv::read_table(ss));
    std::vector<double> a{1, 2}, b{1};
    std::stringstream out;
    CHECK_THROWS(csv::write_columns(out, {"a", "b"}, {&a, &b}));
}

TEST_CASE("parallel_for visits each index once and rethrows", "[core][parallel]") {
    for (unsigned threads : {1u, 2u, 5u}) {
        std::vector<std::atomic<int>> hits(97);
        parallel_for(hits.size(), threads, [&](std::size_t i) { hits[i]++; });
        for (auto& h : hits) CHECK(h.load() == 1);
    }
    CHECK_THROWS_AS(parallel_for(10, 3,
                                 [](std::size_t i) {
                                     if (i == 7) throw DomainError("boom");
                                 }),
                    DomainError);
    CHECK(default_thread_count() >= 1);
}
