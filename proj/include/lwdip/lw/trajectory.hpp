#pragma once

#include "lwdip/core/vec3.hpp"

#include <cstddef>
#include <optional>
#include <vector>

namespace lwdip::lw {

/// Kinematic state of a point charge at one instant.
struct ChargeState {
    double t = 0.0;
    Vec3 r;
    Vec3 v;
    Vec3 a;
};

/// Append-only record of one point charge sampled at a fixed spacing.
///
/// Samples are appended at t_start + k*dt. Queries before t_start return the
/// static pre-history state (zero velocity and acceleration). Queries inside
/// the recorded range interpolate: cubic Hermite on position from the stored
/// (r, v) pairs, its derivative for velocity, and linear for acceleration.
///
/// With a non-zero capacity the record is a ring buffer holding only the most
/// recent `capacity` samples; queries that fall before the retained window
/// (but after t_start) throw HistoryError.
class TrajectoryHistory {
public:
    TrajectoryHistory(double charge, double t_start, double dt, Vec3 pre_history_position,
                      std::size_t capacity = 0);

    /// Appends the next sample; its time must be t_start + size()*dt.
    void append(const Vec3& r, const Vec3& v, const Vec3& a);

    /// State at time t. Throws HistoryError for t after the latest sample or
    /// before the retained window of a bounded history.
    ChargeState state_at(double t) const;

    double charge() const noexcept { return charge_; }
    double t_start() const noexcept { return t_start_; }
    double dt() const noexcept { return dt_; }
    const ChargeState& pre_history() const noexcept { return pre_; }

    /// Number of samples ever appended (not the number retained).
    std::size_t size() const noexcept { return count_; }
    bool empty() const noexcept { return count_ == 0; }
    std::size_t capacity() const noexcept { return capacity_; }

    /// Time of the latest sample; nullopt if nothing has been appended.
    std::optional<double> latest_time() const;
    /// Earliest time a query can resolve (t_start when everything is retained).
    double earliest_retained_time() const;

    /// Sample by absolute index; must be retained.
    ChargeState sample(std::size_t index) const;
    /// Most recent sample; history must be non-empty.
    ChargeState latest() const { return sample(count_ - 1); }

private:
    struct Stored {
        Vec3 r, v, a;
    };
    const Stored& stored(std::size_t index) const;
    double time_of(std::size_t index) const { return t_start_ + static_cast<double>(index) * dt_; }

    double charge_;
    double t_start_;
    double dt_;
    ChargeState pre_;
    std::size_t capacity_;
    std::size_t count_ = 0;
    std::vector<Stored> samples_;
};

} // namespace lwdip::lw
