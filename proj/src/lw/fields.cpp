#include "lwdip/lw/fields.hpp"

#include "lwdip/core/constants.hpp"
#include "lwdip/core/errors.hpp"
#include "lwdip/core/parallel.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace lwdip::lw {

namespace {

using constants::c;

constexpr int kNewtonIterations = 25;
constexpr int kBisectionIterations = 200;

// Latest time at which the trajectory can be evaluated without extrapolating.
double clamp_to_known(double t, const TrajectoryHistory& traj) {
    const auto last = traj.latest_time();
    if (!last || t <= *last) return t;
    return *last;
}

double residual(const Vec3& obs, double t, double tr, const TrajectoryHistory& traj) {
    return tr - t + norm(obs - traj.state_at(tr).r) / c;
}

void check_exclusion(double distance, const Vec3& obs, double t) {
    if (distance < constants::exclusion_radius) {
        std::ostringstream msg;
        msg << "retarded_time: observation point " << obs << " at t=" << t
            << " lies within the exclusion radius of the source (distance " << distance << " m)";
        throw SingularityError(msg.str());
    }
}

double bisect(const Vec3& obs, double t, const TrajectoryHistory& traj, double tol) {
    double hi = t;
    double f_hi = residual(obs, t, hi, traj);
    if (f_hi <= 0.0) return hi;  // source sits on the observer; caller rejects via exclusion radius

    double span = std::max(f_hi, traj.dt());
    double lo = t - 2.0 * span;
    double f_lo = residual(obs, t, lo, traj);
    for (int k = 0; f_lo > 0.0; ++k) {
        if (k > 200) throw SolverError("retarded_time: could not bracket the retarded time", f_lo);
        span *= 2.0;
        lo = t - 2.0 * span;
        f_lo = residual(obs, t, lo, traj);
    }
    for (int k = 0; k < kBisectionIterations && hi - lo > tol; ++k) {
        const double mid = 0.5 * (lo + hi);
        const double f_mid = residual(obs, t, mid, traj);
        if (f_mid > 0.0) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return 0.5 * (lo + hi);
}

} // namespace

double retarded_time(const Vec3& obs, double t, const TrajectoryHistory& traj, std::optional<double> guess) {
    // Entirely in the static pre-history: closed form.
    if (t < traj.t_start() || traj.empty()) {
        const double dist = norm(obs - traj.pre_history().r);
        check_exclusion(dist, obs, t);
        const double tr = t - dist / c;
        if (tr < traj.t_start() || traj.empty()) return tr;
    }

    double tr = guess ? std::min(*guess, t) : t - norm(obs - traj.state_at(clamp_to_known(t, traj)).r) / c;
    const double eps = std::numeric_limits<double>::epsilon();

    bool converged = false;
    for (int k = 0; k < kNewtonIterations; ++k) {
        const ChargeState s = traj.state_at(tr);
        const Vec3 sep = obs - s.r;
        const double dist = norm(sep);
        check_exclusion(dist, obs, t);
        const double f = tr - t + dist / c;
        const double fprime = 1.0 - dot(sep, s.v) / (dist * c);
        const double step = f / fprime;
        const double next = tr - step;
        if (!(next <= t) || !std::isfinite(next)) break;
        tr = next;
        const double tol = 4.0 * eps * (std::abs(t) + dist / c);
        if (std::abs(step) <= tol) {
            converged = true;
            break;
        }
    }

    if (!converged) {
        const double tol = 4.0 * eps * (std::abs(t) + traj.dt());
        tr = bisect(obs, t, traj, tol);
    }

    const ChargeState s = traj.state_at(tr);
    const double dist = norm(obs - s.r);
    check_exclusion(dist, obs, t);
    const double res = tr - t + dist / c;
    if (std::abs(res) > 1e-3 * traj.dt()) {
        throw SolverError("retarded_time: residual above 1e-3*dt after Newton and bisection", res);
    }
    return tr;
}

Potentials lw_potentials(const Vec3& obs, double t, const TrajectoryHistory& traj) {
    const double tr = retarded_time(obs, t, traj);
    const ChargeState s = traj.state_at(tr);
    const Vec3 sep = obs - s.r;
    const double dist = norm(sep);
    const double kappa = 1.0 - dot(sep, s.v) / (dist * c);
    Potentials p;
    p.phi = traj.charge() / (4.0 * constants::pi * constants::eps0 * kappa * dist);
    p.A = s.v * (p.phi / (c * c));
    return p;
}

FieldSample lw_fields_from_state(const Vec3& obs, double charge, const ChargeState& src) {
    const Vec3 sep = obs - src.r;
    const double dist = norm(sep);
    const Vec3 n = sep / dist;
    const Vec3 u = c * n - src.v;
    const double sep_dot_u = dot(sep, u);
    const double k = charge / (4.0 * constants::pi * constants::eps0);
    const double factor = k * dist / (sep_dot_u * sep_dot_u * sep_dot_u);

    FieldSample f;
    f.E_coul = (factor * (c * c - dot(src.v, src.v))) * u;
    f.E_rad = factor * cross(sep, cross(u, src.a));
    f.B = cross(n, f.E_coul + f.E_rad) / c;
    const double kappa = 1.0 - dot(n, src.v) / c;
    f.phi = k / (kappa * dist);
    f.A = src.v * (f.phi / (c * c));
    return f;
}

FieldSample lw_fields(const Vec3& obs, double t, const TrajectoryHistory& traj) {
    const double tr = retarded_time(obs, t, traj);
    return lw_fields_from_state(obs, traj.charge(), traj.state_at(tr));
}

FieldSample superposed_fields(const Vec3& obs, double t, std::span<const TrajectoryHistory* const> sources) {
    FieldSample total;
    for (const TrajectoryHistory* src : sources) total += lw_fields(obs, t, *src);
    return total;
}

std::vector<GridPoint> field_on_grid(std::span<const TrajectoryHistory* const> sources, std::span<const Vec3> grid,
                                     double t, unsigned threads) {
    std::vector<GridPoint> out(grid.size());
    parallel_for(grid.size(), threads, [&](std::size_t i) {
        try {
            out[i].sample = superposed_fields(grid[i], t, sources);
        } catch (const Error& err) {
            out[i].error = "grid point " + std::to_string(i) + ": " + err.what();
        }
    });
    return out;
}

} // namespace lwdip::lw
