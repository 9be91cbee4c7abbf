#include "catch_amalgamated.hpp"

#include "lwdip/core/constants.hpp"
#include "lwdip/core/errors.hpp"
#include "lwdip/lw/fields.hpp"
#include "lwdip/lw/trajectory.hpp"

#include <cmath>
#include <random>
#include <vector>

using namespace lwdip;
using namespace lwdip::lw;
using Catch::Approx;

namespace {

const double kC = 299792458.0;
const double kQ = 1.602176634e-19;
const double kK = 1.0 / (4.0 * 3.14159265358979323846 * 8.8541878128e-12);

double rel(const Vec3& a, const Vec3& b) { return norm(a - b) / norm(b); }

// Closed-form delay for uniform motion: |p + v tau| = c tau with p = obs - r(t).
double uniform_delay(const Vec3& p, const Vec3& v) {
    const double a = kC * kC - dot(v, v);
    const double b = dot(p, v);
    const double disc = std::sqrt(b * b + a * dot(p, p));
    return b >= 0.0 ? (b + disc) / a : dot(p, p) / (disc - b);
}

TrajectoryHistory uniform_history(const Vec3& r0, const Vec3& v, double dt, int n) {
    TrajectoryHistory h(kQ, 0.0, dt, r0);
    for (int k = 0; k <= n; ++k) h.append(r0 + (k * dt) * v, v, Vec3{});
    return h;
}

struct Oscillating {
    double amp, omega;
    Vec3 r(double t) const { return {0.0, amp * std::sin(omega * t), 0.0}; }
    Vec3 v(double t) const { return {0.0, amp * omega * std::cos(omega * t), 0.0}; }
    Vec3 a(double t) const { return {0.0, -amp * omega * omega * std::sin(omega * t), 0.0}; }
};

} // namespace

TEST_CASE("pre-history is static", "[lw][trajectory]") {
    TrajectoryHistory h(kQ, 1e-15, 1e-17, Vec3{1e-9, 2e-9, 0});
    h.append(Vec3{1e-9, 2e-9, 0}, Vec3{5, 0, 0}, Vec3{1e10, 0, 0});
    const auto s = h.state_at(-3e-15);
    CHECK(s.r == Vec3{1e-9, 2e-9, 0});
    CHECK(s.v == Vec3{});
    CHECK(s.a == Vec3{});
}

TEST_CASE("Hermite interpolation reproduces a cubic trajectory", "[lw][trajectory]") {
    const double dt = 1e-17;
    const Vec3 c0{1e-9, -2e-9, 3e-10}, c1{120.0, -40.0, 7.0}, c2{3e19, 1e19, -2e19}, c3{-4e33, 2e33, 1e33};
    auto r = [&](double t) { return c0 + t * c1 + (t * t) * c2 + (t * t * t) * c3; };
    auto v = [&](double t) { return c1 + (2.0 * t) * c2 + (3.0 * t * t) * c3; };
    auto a = [&](double t) { return 2.0 * c2 + (6.0 * t) * c3; };
    TrajectoryHistory h(kQ, 0.0, dt, c0);
    for (int k = 0; k <= 200; ++k) h.append(r(k * dt), v(k * dt), a(k * dt));

    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 200.0 * dt);
    for (int i = 0; i < 500; ++i) {
        const double t = u(rng);
        const auto s = h.state_at(t);
        CHECK(norm(s.r - r(t)) <= 1e-12 * norm(r(t)));
        CHECK(rel(s.v, v(t)) < 1e-9);
        CHECK(rel(s.a, a(t)) < 1e-9);
    }
}

TEST_CASE("history range errors", "[lw][trajectory]") {
    TrajectoryHistory empty(kQ, 0.0, 1e-17, Vec3{});
    CHECK_THROWS_AS(empty.state_at(1e-18), HistoryError);

    TrajectoryHistory h(kQ, 0.0, 1e-17, Vec3{});
    for (int k = 0; k < 10; ++k) h.append(Vec3{}, Vec3{}, Vec3{});
    CHECK_NOTHROW(h.state_at(9e-17));
    CHECK_THROWS_AS(h.state_at(9.5e-17), HistoryError);

    TrajectoryHistory ring(kQ, 0.0, 1e-17, Vec3{}, 8);
    for (int k = 0; k < 50; ++k) ring.append(Vec3{k * 1e-12, 0, 0}, Vec3{}, Vec3{});
    CHECK(ring.size() == 50);
    CHECK(ring.latest().r.x == Approx(49e-12));
    CHECK_NOTHROW(ring.state_at(45e-17));
    CHECK_THROWS_AS(ring.state_at(10e-17), HistoryError);
    CHECK_THROWS_AS(ring.sample(3), HistoryError);
    CHECK_THROWS_AS(TrajectoryHistory(kQ, 0.0, 0.0, Vec3{}), DomainError);
}

TEST_CASE("retarded time of a static charge", "[lw][retarded]") {
    TrajectoryHistory h(kQ, 0.0, 1e-17, Vec3{1e-9, 0, 0});
    for (int k = 0; k <= 1000; ++k) h.append(Vec3{1e-9, 0, 0}, Vec3{}, Vec3{});
    const Vec3 obs{3e-7, -1e-7, 2e-8};
    const double t = 1000e-17;
    const double expect = t - norm(obs - Vec3{1e-9, 0, 0}) / kC;
    CHECK(std::abs(retarded_time(obs, t, h) - expect) <= 1e-15 * t);
    // Before the record starts the pre-history closed form applies.
    CHECK(retarded_time(obs, -1e-15, h) == Approx(-1e-15 - norm(obs - Vec3{1e-9, 0, 0}) / kC).epsilon(1e-14));
}

TEST_CASE("retarded time of uniform motion matches the quadratic root", "[lw][retarded]") {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const double dt = 1e-17;
    for (int trial = 0; trial < 50; ++trial) {
        const Vec3 v = (0.009 * kC) * normalized(Vec3{u(rng), u(rng), u(rng)});
        const Vec3 r0{1e-8 * u(rng), 1e-8 * u(rng), 1e-8 * u(rng)};
        const auto h = uniform_history(r0, v, dt, 3000);
        const Vec3 obs{5e-7 * u(rng), 5e-7 * u(rng), 5e-7 * u(rng)};
        const double t = 3000 * dt;
        const double tau = uniform_delay(obs - (r0 + t * v), v);
        const double tr = retarded_time(obs, t, h);
        CHECK(std::abs((t - tr) - tau) <= 1e-12 * tau);
    }
}

TEST_CASE("observer on the charge is a singularity", "[lw][retarded]") {
    TrajectoryHistory h(kQ, 0.0, 1e-17, Vec3{});
    for (int k = 0; k <= 10; ++k) h.append(Vec3{}, Vec3{}, Vec3{});
    CHECK_THROWS_AS(lw_fields(Vec3{}, 5e-17, h), SingularityError);
    CHECK_THROWS_AS(lw_fields(Vec3{1e-16, 0, 0}, 5e-17, h), SingularityError);
}

TEST_CASE("static charge fields equal Coulomb", "[lw][fields]") {
    TrajectoryHistory h(kQ, 0.0, 1e-17, Vec3{});
    for (int k = 0; k <= 1000; ++k) h.append(Vec3{}, Vec3{}, Vec3{});
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 100; ++i) {
        const Vec3 obs{2e-6 * u(rng), 2e-6 * u(rng), 2e-6 * u(rng)};
        const double r = norm(obs);
        if (r < 1e-8) continue;
        const auto f = lw_fields(obs, 1000e-17, h);
        const Vec3 ref = (kK * kQ / (r * r * r)) * obs;
        CHECK(rel(f.E(), ref) < 1e-12);
        CHECK(norm(f.E_rad) == 0.0);
        CHECK(norm(f.B) <= 1e-15 * norm(f.E()) / kC);
        CHECK(f.phi == Approx(kK * kQ / r).epsilon(1e-12));
    }
}

TEST_CASE("uniformly moving charge: field points from the present position", "[lw][fields]") {
    const double dt = 1e-17;
    const Vec3 v{0.008 * kC, 0.0, 0.003 * kC};
    const Vec3 r0{0, 0, 0};
    const auto h = uniform_history(r0, v, dt, 4000);
    const double t = 4000 * dt;
    const Vec3 present = r0 + t * v;
    const double beta2 = dot(v, v) / (kC * kC);
    for (const Vec3& obs : {Vec3{4e-7, 1e-7, 0}, Vec3{-2e-7, 3e-7, 1e-7}, Vec3{0, 0, 5e-7}}) {
        const Vec3 R = obs - present;
        const double sin2 = norm2(cross(R, v)) / (norm2(R) * dot(v, v));
        const double mag = kK * kQ * (1.0 - beta2) / (norm2(R) * std::pow(1.0 - beta2 * sin2, 1.5));
        const Vec3 E_ref = mag * normalized(R);
        const auto f = lw_fields(obs, t, h);
        CHECK(rel(f.E(), E_ref) < 1e-10);
        CHECK(rel(f.B, (1.0 / (kC * kC)) * cross(v, E_ref)) < 1e-10);
    }
}

TEST_CASE("fields are consistent with the potentials", "[lw][fields]") {
    // E = -grad(phi) - dA/dt and B = curl(A), by central differences.
    const Oscillating osc{2e-10, 1.2566e15};
    const double dt = 1e-18;
    TrajectoryHistory h(kQ, 0.0, dt, osc.r(0.0));
    const int n = 8000;
    for (int k = 0; k <= n; ++k) h.append(osc.r(k * dt), osc.v(k * dt), osc.a(k * dt));

    const Vec3 obs{6e-7, 2e-7, -1e-7};
    const double t = (n - 200) * dt;
    const double hx = 1e-10, ht = 2e-19;
    auto phi = [&](const Vec3& p, double tt) { return lw_potentials(p, tt, h).phi; };
    auto A = [&](const Vec3& p, double tt) { return lw_potentials(p, tt, h).A; };
    const Vec3 ex{hx, 0, 0}, ey{0, hx, 0}, ez{0, 0, hx};
    const Vec3 grad{(phi(obs + ex, t) - phi(obs - ex, t)) / (2 * hx), (phi(obs + ey, t) - phi(obs - ey, t)) / (2 * hx),
                    (phi(obs + ez, t) - phi(obs - ez, t)) / (2 * hx)};
    const Vec3 dAdt = (1.0 / (2 * ht)) * (A(obs, t + ht) - A(obs, t - ht));
    const Vec3 E_fd = -1.0 * grad - dAdt;

    auto dA = [&](const Vec3& e) { return (1.0 / (2 * hx)) * (A(obs + e, t) - A(obs - e, t)); };
    const Vec3 dAx = dA(ex), dAy = dA(ey), dAz = dA(ez);
    const Vec3 B_fd{dAy.z - dAz.y, dAz.x - dAx.z, dAx.y - dAy.x};

    const auto f = lw_fields(obs, t, h);
    CHECK(rel(f.E(), E_fd) < 1e-5);
    CHECK(rel(f.B, B_fd) < 1e-4);
}

TEST_CASE("magnetic field is n x E / c", "[lw][fields]") {
    const Oscillating osc{2e-10, 1.2566e15};
    const double dt = 1e-17;
    TrajectoryHistory h(kQ, 0.0, dt, osc.r(0.0));
    for (int k = 0; k <= 3000; ++k) h.append(osc.r(k * dt), osc.v(k * dt), osc.a(k * dt));
    const Vec3 obs{3e-7, 4e-7, 1e-7};
    const double t = 3000 * dt;
    const double tr = retarded_time(obs, t, h);
    const Vec3 n = normalized(obs - h.state_at(tr).r);
    const auto f = lw_fields(obs, t, h);
    CHECK(rel(f.B, (1.0 / kC) * cross(n, f.E())) < 1e-12);
}

TEST_CASE("superposition and grid evaluation isolate failures", "[lw][fields]") {
    TrajectoryHistory p(kQ, 0.0, 1e-17, Vec3{1e-9, 0, 0});
    TrajectoryHistory m(-kQ, 0.0, 1e-17, Vec3{-1e-9, 0, 0});
    for (int k = 0; k <= 500; ++k) {
        p.append(Vec3{1e-9, 0, 0}, Vec3{}, Vec3{});
        m.append(Vec3{-1e-9, 0, 0}, Vec3{}, Vec3{});
    }
    const TrajectoryHistory* src[] = {&p, &m};
    const std::vector<Vec3> grid{{0, 1e-7, 0}, {1e-9, 0, 0}, {2e-7, 0, 0}};
    const auto out = field_on_grid(src, grid, 500e-17, 2);
    REQUIRE(out.size() == 3);
    REQUIRE(out[0].sample);
    CHECK_FALSE(out[1].sample);
    CHECK_FALSE(out[1].error.empty());
    REQUIRE(out[2].sample);
    const auto direct = superposed_fields(grid[2], 500e-17, src);
    CHECK(out[2].sample->E() == direct.E());
    // On the bisector the pair's field is antiparallel to the dipole axis.
    CHECK(out[0].sample->E().x < 0.0);
    CHECK(std::abs(out[0].sample->E().y) < 1e-12 * std::abs(out[0].sample->E().x));
}
