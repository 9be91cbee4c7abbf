#pragma once

#include "lwdip/core/dipole_params.hpp"
#include "lwdip/core/vec3.hpp"
#include "lwdip/lw/trajectory.hpp"

#include <cstddef>
#include <optional>
#include <vector>

namespace lwdip::sim {

/// Prescribed sinusoidal centre-of-mass motion R0 + R_M sin(omega_M t + phase) along `axis`.
struct MechanicalDrive {
    double R0 = 0.0;        // static separation from the origin, m
    double R_M = 0.0;       // amplitude, m
    double omega_M = 0.0;   // rad/s
    double phase = 0.0;     // rad
    Vec3 axis{1.0, 0.0, 0.0};

    /// Throws DomainError unless 0 <= R_M/R0 < 0.8, R_M*omega_M <= c/100 and |axis| = 1.
    void validate() const;
};

Vec3 com_position(const MechanicalDrive& drive, double t);
Vec3 com_velocity(const MechanicalDrive& drive, double t);
Vec3 com_acceleration(const MechanicalDrive& drive, double t);

/// Initial data for one Lorentz-oscillator dipole.
struct DipoleInit {
    DipoleParams params;
    Vec3 polarization{0.0, 1.0, 0.0};
    Vec3 position;                          // static COM; ignored when `drive` is set
    std::optional<MechanicalDrive> drive;   // prescribed COM motion
    double y_init = 0.0;                    // initial charge separation, m
    double ydot_init = 0.0;                 // m/s
};

enum class HistoryMode {
    bounded,  // ring buffer sized from the largest light-travel time in the system
    full,     // keep every sample
};

struct SimulationConfig {
    std::vector<DipoleInit> dipoles;
    double dt = 1e-17;
    std::size_t n_steps = 0;
    std::size_t record_stride = 10;
    /// Evaluate the driving field as the mean over the dipole's two charge
    /// positions instead of at its centre of mass.
    bool field_at_charges = false;
    HistoryMode history = HistoryMode::bounded;

    /// Throws DomainError when an invariant fails (dt*omega0 <= 0.1, unit
    /// polarizations, valid drives, stride >= 1).
    void validate() const;
};

/// Recorded time series; index [n][k] is dipole n at record k.
struct SimulationResult {
    std::vector<double> times;
    std::vector<std::vector<double>> dipole_moment;
    std::vector<std::vector<double>> energy;
    std::vector<std::vector<double>> population;  // all zeros for a dipole that was never excited
    double dt = 0.0;
    std::size_t record_stride = 1;

    std::size_t dipole_count() const { return dipole_moment.size(); }
};

/// Oscillator energy (omega0^2 m_eff / 2q^2) d^2 + (m_eff / 2q^2) d_dot^2.
double total_energy(double d, double d_dot, const DipoleParams& params);

/// Divides a series by its maximum. Throws DegenerateInputError for an empty
/// or non-positive-maximum series.
std::vector<double> scaled_population(const std::vector<double>& energy);

/// Internal state of one dipole during a run.
struct DipoleState {
    double y = 0.0;
    double y_dot = 0.0;
    double field = 0.0;       // driving field component at the current time, V/m
    double prev_field = 0.0;  // same at the previous step
};

/// Self-consistent time stepper for N coupled Lorentz dipoles.
///
/// Each step advances the internal coordinate of every dipole with the exact
/// propagator of the damped oscillator, the driving field being extrapolated
/// linearly from its values at the current and previous steps. The new
/// lab-frame charge kinematics are then appended to the histories and the
/// driving fields at the new time are evaluated from the Lienard-Wiechert
/// fields of every other dipole's charges.
class Simulator {
public:
    explicit Simulator(SimulationConfig cfg);

    /// Advances by one time step. Throws VelocityLimitError if any charge
    /// exceeds c/100.
    void step();

    double time() const { return static_cast<double>(step_) * cfg_.dt; }
    std::size_t step_index() const { return step_; }
    const SimulationConfig& config() const { return cfg_; }
    const DipoleState& state(std::size_t n) const { return states_[n]; }
    double dipole_moment(std::size_t n) const { return cfg_.dipoles[n].params.q * states_[n].y; }
    double dipole_moment_rate(std::size_t n) const { return cfg_.dipoles[n].params.q * states_[n].y_dot; }
    Vec3 com(std::size_t n, double t) const;

    /// Histories of the positive and negative charge of dipole n.
    const lw::TrajectoryHistory& positive_charge(std::size_t n) const { return histories_[2 * n]; }
    const lw::TrajectoryHistory& negative_charge(std::size_t n) const { return histories_[2 * n + 1]; }

private:
    struct Propagator {
        double decay, cos_wd, sin_wd, omega_d, lambda;
    };

    void append_kinematics(std::size_t n, double t, double y_ddot);
    double driving_field(std::size_t n, double t);
    double field_at(const Vec3& obs, std::size_t n, double t);

    SimulationConfig cfg_;
    std::vector<Propagator> props_;
    std::vector<DipoleState> states_;
    std::vector<lw::TrajectoryHistory> histories_;
    std::vector<double> tr_cache_;  // last retarded time per (observer dipole, source charge)
    std::size_t step_ = 0;
};

/// Runs cfg.n_steps steps and records every cfg.record_stride-th state
/// (including t = 0). Errors from a step are rethrown tagged with the step.
SimulationResult run_simulation(const SimulationConfig& cfg);

/// Upper bound on any source-to-observer light-travel time, in steps.
std::size_t light_horizon_steps(const SimulationConfig& cfg);

} // namespace lwdip::sim
