#include "lwdip/sim/dipole_sim.hpp"

#include "lwdip/core/constants.hpp"
#include "lwdip/core/errors.hpp"
#include "lwdip/lw/fields.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

namespace lwdip::sim {

namespace {

constexpr double kUnitTolerance = 1e-12;

void require_unit(const Vec3& v, const std::string& what) {
    if (std::abs(norm(v) - 1.0) > kUnitTolerance) throw DomainError(what + " must be a unit vector");
}

} // namespace

void MechanicalDrive::validate() const {
    if (!(R0 > 0.0)) throw DomainError("MechanicalDrive: R0 must be positive");
    if (!(R_M >= 0.0) || !(R_M / R0 < 0.8)) throw DomainError("MechanicalDrive: R_M/R0 must lie in [0, 0.8)");
    if (!(omega_M >= 0.0)) throw DomainError("MechanicalDrive: omega_M must be non-negative");
    if (R_M * omega_M > constants::max_charge_speed) {
        throw DomainError("MechanicalDrive: drive speed R_M*omega_M exceeds c/100");
    }
    require_unit(axis, "MechanicalDrive: axis");
}

Vec3 com_position(const MechanicalDrive& drive, double t) {
    return (drive.R0 + drive.R_M * std::sin(drive.omega_M * t + drive.phase)) * drive.axis;
}

Vec3 com_velocity(const MechanicalDrive& drive, double t) {
    return (drive.R_M * drive.omega_M * std::cos(drive.omega_M * t + drive.phase)) * drive.axis;
}

Vec3 com_acceleration(const MechanicalDrive& drive, double t) {
    return (-drive.R_M * drive.omega_M * drive.omega_M * std::sin(drive.omega_M * t + drive.phase)) * drive.axis;
}

void SimulationConfig::validate() const {
    if (dipoles.empty()) throw DomainError("SimulationConfig: at least one dipole is required");
    if (!(dt > 0.0)) throw DomainError("SimulationConfig: dt must be positive");
    if (record_stride == 0) throw DomainError("SimulationConfig: record_stride must be >= 1");
    for (std::size_t n = 0; n < dipoles.size(); ++n) {
        const auto& d = dipoles[n];
        const std::string who = "SimulationConfig: dipole " + std::to_string(n + 1);
        if (!(d.params.omega0 > 0.0) || !(d.params.q > 0.0) || !(d.params.m_eff > 0.0)) {
            throw DomainError(who + " has non-positive q, omega0 or m_eff");
        }
        if (dt * d.params.omega0 > 0.1) {
            throw DomainError(who + ": dt*omega0 = " + std::to_string(dt * d.params.omega0) + " exceeds 0.1");
        }
        if (d.params.gamma0 >= 2.0 * d.params.omega0) throw DomainError(who + " is not underdamped");
        require_unit(d.polarization, who + " polarization");
        if (d.drive) d.drive->validate();
    }
}

double total_energy(double d, double d_dot, const DipoleParams& p) {
    const double scale = p.m_eff / (2.0 * p.q * p.q);
    return scale * (p.omega0 * p.omega0 * d * d + d_dot * d_dot);
}

std::vector<double> scaled_population(const std::vector<double>& energy) {
    if (energy.empty()) throw DegenerateInputError("scaled_population: empty energy series");
    const double peak = *std::max_element(energy.begin(), energy.end());
    if (!(peak > 0.0)) throw DegenerateInputError("scaled_population: energy series has no positive maximum");
    std::vector<double> out(energy.size());
    std::transform(energy.begin(), energy.end(), out.begin(), [peak](double e) { return e / peak; });
    return out;
}

std::size_t light_horizon_steps(const SimulationConfig& cfg) {
    double widest = 0.0;
    for (std::size_t i = 0; i < cfg.dipoles.size(); ++i) {
        for (std::size_t j = 0; j < cfg.dipoles.size(); ++j) {
            const auto& a = cfg.dipoles[i];
            const auto& b = cfg.dipoles[j];
            const Vec3 pa = a.drive ? a.drive->R0 * a.drive->axis : a.position;
            const Vec3 pb = b.drive ? b.drive->R0 * b.drive->axis : b.position;
            const double swing = (a.drive ? a.drive->R_M : 0.0) + (b.drive ? b.drive->R_M : 0.0);
            const double size = std::max(std::abs(a.y_init), a.params.y0) + std::max(std::abs(b.y_init), b.params.y0);
            widest = std::max(widest, norm(pa - pb) + swing + 2.0 * size);
        }
    }
    return static_cast<std::size_t>(std::ceil(widest / constants::c / cfg.dt)) + 1;
}

Simulator::Simulator(SimulationConfig cfg) : cfg_(std::move(cfg)) {
    cfg_.validate();
    const std::size_t n_dip = cfg_.dipoles.size();

    std::size_t capacity = 0;
    if (cfg_.history == HistoryMode::bounded) {
        // The bisection fallback may look back up to twice the light horizon.
        capacity = 4 * light_horizon_steps(cfg_) + 64;
    }

    histories_.reserve(2 * n_dip);
    for (std::size_t n = 0; n < n_dip; ++n) {
        const auto& d = cfg_.dipoles[n];
        const Vec3 c0 = com(n, 0.0);
        const Vec3 half = (0.5 * d.y_init) * d.polarization;
        histories_.emplace_back(+d.params.q, 0.0, cfg_.dt, c0 + half, capacity);
        histories_.emplace_back(-d.params.q, 0.0, cfg_.dt, c0 - half, capacity);

        const double lambda = 0.5 * d.params.gamma0;
        const double wd = std::sqrt(d.params.omega0 * d.params.omega0 - lambda * lambda);
        props_.push_back({std::exp(-lambda * cfg_.dt), std::cos(wd * cfg_.dt), std::sin(wd * cfg_.dt), wd, lambda});

        DipoleState s;
        s.y = d.y_init;
        s.y_dot = d.ydot_init;
        states_.push_back(s);
    }
    tr_cache_.assign(4 * n_dip * n_dip, std::numeric_limits<double>::quiet_NaN());

    // Fields at t = 0 come from the static pre-history.
    for (std::size_t n = 0; n < n_dip; ++n) {
        states_[n].field = driving_field(n, 0.0);
        states_[n].prev_field = states_[n].field;
    }
    for (std::size_t n = 0; n < n_dip; ++n) {
        const auto& p = cfg_.dipoles[n].params;
        const auto& s = states_[n];
        const double y_ddot = p.q / p.m_eff * s.field - p.gamma0 * s.y_dot - p.omega0 * p.omega0 * s.y;
        append_kinematics(n, 0.0, y_ddot);
    }
}

Vec3 Simulator::com(std::size_t n, double t) const {
    const auto& d = cfg_.dipoles[n];
    return d.drive ? com_position(*d.drive, t) : d.position;
}

void Simulator::append_kinematics(std::size_t n, double t, double y_ddot) {
    const auto& d = cfg_.dipoles[n];
    const auto& s = states_[n];
    Vec3 c_pos = d.position, c_vel, c_acc;
    if (d.drive) {
        c_pos = com_position(*d.drive, t);
        c_vel = com_velocity(*d.drive, t);
        c_acc = com_acceleration(*d.drive, t);
    }
    const Vec3& e = d.polarization;
    const Vec3 dr = (0.5 * s.y) * e;
    const Vec3 dv = (0.5 * s.y_dot) * e;
    const Vec3 da = (0.5 * y_ddot) * e;

    const Vec3 v_plus = c_vel + dv;
    const Vec3 v_minus = c_vel - dv;
    const double vmax = std::max(norm(v_plus), norm(v_minus));
    if (vmax > constants::max_charge_speed) {
        std::ostringstream msg;
        msg << "velocity limit exceeded at step " << step_ << ": charge speed " << vmax << " m/s of dipole " << n + 1
            << " is above c/100";
        throw VelocityLimitError(msg.str(), step_);
    }
    histories_[2 * n].append(c_pos + dr, v_plus, c_acc + da);
    histories_[2 * n + 1].append(c_pos - dr, v_minus, c_acc - da);
}

double Simulator::field_at(const Vec3& obs, std::size_t slot, double t) {
    const std::size_t n_dip = cfg_.dipoles.size();
    const std::size_t observer = slot / 2;
    Vec3 E;
    for (std::size_t m = 0; m < n_dip; ++m) {
        if (m == observer) continue;
        for (std::size_t k = 0; k < 2; ++k) {
            const std::size_t src = 2 * m + k;
            double& cached = tr_cache_[slot * 2 * n_dip + src];
            const auto& hist = histories_[src];
            std::optional<double> guess;
            if (!std::isnan(cached)) guess = cached + cfg_.dt;
            const double tr = lw::retarded_time(obs, t, hist, guess);
            cached = tr;
            E += lw::lw_fields_from_state(obs, hist.charge(), hist.state_at(tr)).E();
        }
    }
    return dot(E, cfg_.dipoles[observer].polarization);
}

double Simulator::driving_field(std::size_t n, double t) {
    if (!cfg_.field_at_charges) return field_at(com(n, t), 2 * n, t);
    const auto& d = cfg_.dipoles[n];
    const Vec3 half = (0.5 * states_[n].y) * d.polarization;
    const Vec3 c0 = com(n, t);
    return 0.5 * (field_at(c0 + half, 2 * n, t) + field_at(c0 - half, 2 * n + 1, t));
}

void Simulator::step() {
    const std::size_t n_dip = cfg_.dipoles.size();
    const double h = cfg_.dt;
    std::vector<double> end_forcing(n_dip);

    for (std::size_t n = 0; n < n_dip; ++n) {
        const auto& p = cfg_.dipoles[n].params;
        const Propagator& pr = props_[n];
        DipoleState& s = states_[n];
        const double w2 = p.omega0 * p.omega0;
        const double q_over_m = p.q / p.m_eff;

        // Forcing F0 + F1*tau over the step, tau in [0, h].
        const double F0 = q_over_m * s.field;
        const double F1 = q_over_m * (s.field - s.prev_field) / h;
        const double B = F1 / w2;
        const double A = (F0 - p.gamma0 * B) / w2;

        const double u0 = s.y - A;
        const double u0_dot = s.y_dot - B;
        const double u1 = pr.decay * (u0 * pr.cos_wd + (u0_dot + pr.lambda * u0) * pr.sin_wd / pr.omega_d);
        const double u1_dot = pr.decay * (u0_dot * pr.cos_wd - (w2 * u0 + pr.lambda * u0_dot) * pr.sin_wd / pr.omega_d);

        s.y = u1 + A + B * h;
        s.y_dot = u1_dot + B;
        end_forcing[n] = F0 + F1 * h;
    }

    ++step_;
    const double t = time();
    for (std::size_t n = 0; n < n_dip; ++n) {
        const auto& p = cfg_.dipoles[n].params;
        const auto& s = states_[n];
        const double y_ddot = end_forcing[n] - p.gamma0 * s.y_dot - p.omega0 * p.omega0 * s.y;
        append_kinematics(n, t, y_ddot);
    }
    for (std::size_t n = 0; n < n_dip; ++n) {
        DipoleState& s = states_[n];
        s.prev_field = s.field;
        s.field = n_dip > 1 ? driving_field(n, t) : 0.0;
    }
}

SimulationResult run_simulation(const SimulationConfig& cfg) {
    Simulator sim(cfg);
    const std::size_t n_dip = cfg.dipoles.size();

    SimulationResult out;
    out.dt = cfg.dt;
    out.record_stride = cfg.record_stride;
    out.dipole_moment.resize(n_dip);
    out.energy.resize(n_dip);
    const std::size_t n_records = cfg.n_steps / cfg.record_stride + 1;
    out.times.reserve(n_records);
    for (std::size_t n = 0; n < n_dip; ++n) {
        out.dipole_moment[n].reserve(n_records);
        out.energy[n].reserve(n_records);
    }

    auto record = [&] {
        out.times.push_back(sim.time());
        for (std::size_t n = 0; n < n_dip; ++n) {
            const double d = sim.dipole_moment(n);
            out.dipole_moment[n].push_back(d);
            out.energy[n].push_back(total_energy(d, sim.dipole_moment_rate(n), cfg.dipoles[n].params));
        }
    };

    record();
    for (std::size_t k = 1; k <= cfg.n_steps; ++k) {
        try {
            sim.step();
        } catch (const VelocityLimitError&) {
            throw;
        } catch (const Error& err) {
            throw SimulationError("step " + std::to_string(k) + ": " + err.what(), k);
        }
        if (k % cfg.record_stride == 0) record();
    }

    out.population.resize(n_dip);
    for (std::size_t n = 0; n < n_dip; ++n) {
        const auto& e = out.energy[n];
        const bool excited = std::any_of(e.begin(), e.end(), [](double v) { return v > 0.0; });
        out.population[n] = excited ? scaled_population(e) : std::vector<double>(e.size(), 0.0);
    }
    return out;
}

} // namespace lwdip::sim
