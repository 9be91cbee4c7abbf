#pragma once

#include "lwdip/core/vec3.hpp"
#include "lwdip/lw/trajectory.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace lwdip::lw {

/// Fields and potentials of one or more point charges at a space-time point.
struct FieldSample {
    Vec3 E_coul;     // velocity (Coulomb) field, V/m
    Vec3 E_rad;      // acceleration (radiation) field, V/m
    Vec3 B;          // T
    double phi = 0;  // scalar potential, V
    Vec3 A;          // vector potential, V s / m

    Vec3 E() const { return E_coul + E_rad; }

    FieldSample& operator+=(const FieldSample& o) {
        E_coul += o.E_coul;
        E_rad += o.E_rad;
        B += o.B;
        phi += o.phi;
        A += o.A;
        return *this;
    }
};

struct Potentials {
    double phi = 0;
    Vec3 A;
};

/// Solves t_r = t - |obs - r_s(t_r)|/c by Newton iteration, starting from
/// `guess` when given and from t - |obs - r_s(t)|/c otherwise. Falls back to
/// bisection if a step leaves (-inf, t] or after 25 iterations.
///
/// Throws SingularityError if the retarded source point is within the
/// exclusion radius of `obs`, SolverError if the residual cannot be brought
/// below 1e-3*dt, and HistoryError if the solve needs unretained history.
double retarded_time(const Vec3& obs, double t, const TrajectoryHistory& traj,
                     std::optional<double> guess = std::nullopt);

Potentials lw_potentials(const Vec3& obs, double t, const TrajectoryHistory& traj);

FieldSample lw_fields(const Vec3& obs, double t, const TrajectoryHistory& traj);

/// Fields from a retarded source state already known (no root solve).
FieldSample lw_fields_from_state(const Vec3& obs, double charge, const ChargeState& src);

/// Superposed fields of several charges, summed in the given order.
FieldSample superposed_fields(const Vec3& obs, double t, std::span<const TrajectoryHistory* const> sources);

struct GridPoint {
    std::optional<FieldSample> sample;
    std::string error;  // empty when sample is set
};

/// Superposed fields at every grid point. A failing point records its error
/// and leaves every other point unaffected. Output order matches `grid`.
std::vector<GridPoint> field_on_grid(std::span<const TrajectoryHistory* const> sources, std::span<const Vec3> grid,
                                     double t, unsigned threads = 1);

} // namespace lwdip::lw
