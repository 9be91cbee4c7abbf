#pragma once

#include "lwdip/sim/dipole_sim.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace lwdip::sim {

/// Header `t,d_1..d_N,energy_1..energy_N,pop_1..pop_N`.
std::vector<std::string> timeseries_header(std::size_t n_dipoles);

/// Writes a SimulationResult as CSV, 17 significant digits, '\n' line endings.
void write_timeseries_csv(std::ostream& os, const SimulationResult& result);

} // namespace lwdip::sim
