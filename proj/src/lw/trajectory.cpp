#include "lwdip/lw/trajectory.hpp"

#include "lwdip/core/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace lwdip::lw {

TrajectoryHistory::TrajectoryHistory(double charge, double t_start, double dt, Vec3 pre_history_position,
                                     std::size_t capacity)
    : charge_(charge), t_start_(t_start), dt_(dt), capacity_(capacity) {
    if (!(dt > 0.0)) throw DomainError("TrajectoryHistory: dt must be positive");
    if (capacity == 1) throw DomainError("TrajectoryHistory: a bounded history needs capacity >= 2");
    pre_.t = t_start;
    pre_.r = pre_history_position;
    if (capacity_ > 0) samples_.reserve(capacity_);
}

void TrajectoryHistory::append(const Vec3& r, const Vec3& v, const Vec3& a) {
    if (capacity_ == 0 || samples_.size() < capacity_) {
        samples_.push_back({r, v, a});
    } else {
        samples_[count_ % capacity_] = {r, v, a};
    }
    ++count_;
}

const TrajectoryHistory::Stored& TrajectoryHistory::stored(std::size_t index) const {
    if (capacity_ == 0) return samples_[index];
    return samples_[index % capacity_];
}

std::optional<double> TrajectoryHistory::latest_time() const {
    if (count_ == 0) return std::nullopt;
    return time_of(count_ - 1);
}

double TrajectoryHistory::earliest_retained_time() const {
    if (capacity_ == 0 || count_ <= capacity_) return t_start_;
    return time_of(count_ - capacity_);
}

ChargeState TrajectoryHistory::sample(std::size_t index) const {
    if (index >= count_ || (capacity_ > 0 && count_ > capacity_ && index < count_ - capacity_)) {
        throw HistoryError("TrajectoryHistory: sample " + std::to_string(index) + " is not retained");
    }
    const Stored& s = stored(index);
    return {time_of(index), s.r, s.v, s.a};
}

ChargeState TrajectoryHistory::state_at(double t) const {
    if (t < t_start_ || count_ == 0) {
        if (count_ == 0 && t >= t_start_) {
            throw HistoryError("TrajectoryHistory: query at t=" + std::to_string(t) + " but no samples recorded");
        }
        ChargeState s = pre_;
        s.t = t;
        return s;
    }

    const double last = time_of(count_ - 1);
    // Allow a few ulps of slack so t == latest computed via different arithmetic still resolves.
    const double slack = 4.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(last), dt_);
    if (t > last + slack) {
        throw HistoryError("TrajectoryHistory: query at t=" + std::to_string(t) +
                           " is after the latest sample t=" + std::to_string(last));
    }
    if (t < earliest_retained_time()) {
        throw HistoryError("TrajectoryHistory: query at t=" + std::to_string(t) +
                           " precedes the retained window (increase the history capacity)");
    }
    if (count_ == 1) {
        const Stored& s = stored(0);
        return {t, s.r, s.v, s.a};
    }

    const double x = (t - t_start_) / dt_;
    auto i = static_cast<std::size_t>(std::floor(x));
    if (i >= count_ - 1) i = count_ - 2;
    double s = x - static_cast<double>(i);
    if (s < 0.0) s = 0.0;
    if (s > 1.0) s = 1.0;

    const Stored& p0 = stored(i);
    const Stored& p1 = stored(i + 1);
    const double h = dt_;
    const double s2 = s * s;
    const double s3 = s2 * s;

    const double h10 = s3 - 2.0 * s2 + s;
    const double h01 = -2.0 * s3 + 3.0 * s2;
    const double h11 = s3 - s2;

    const double d10 = 3.0 * s2 - 4.0 * s + 1.0;
    const double d01 = -6.0 * s2 + 6.0 * s;
    const double d11 = 3.0 * s2 - 2.0 * s;

    ChargeState out;
    out.t = t;
    // h00 = 1 - h01, so write position relative to p0 to avoid cancellation.
    const Vec3 chord = p1.r - p0.r;
    out.r = p0.r + h01 * chord + (h10 * h) * p0.v + (h11 * h) * p1.v;
    out.v = (d01 / h) * chord + d10 * p0.v + d11 * p1.v;
    out.a = (1.0 - s) * p0.a + s * p1.a;
    return out;
}

} // namespace lwdip::lw
