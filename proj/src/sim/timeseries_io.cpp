#include "lwdip/sim/timeseries_io.hpp"

#include "lwdip/core/csv.hpp"

#include <ostream>

namespace lwdip::sim {

std::vector<std::string> timeseries_header(std::size_t n_dipoles) {
    std::vector<std::string> h{"t"};
    for (const char* prefix : {"d_", "energy_", "pop_"}) {
        for (std::size_t n = 1; n <= n_dipoles; ++n) h.push_back(prefix + std::to_string(n));
    }
    return h;
}

void write_timeseries_csv(std::ostream& os, const SimulationResult& result) {
    const std::size_t n = result.dipole_count();
    std::vector<const std::vector<double>*> cols{&result.times};
    for (const auto* group : {&result.dipole_moment, &result.energy, &result.population}) {
        for (std::size_t i = 0; i < n; ++i) cols.push_back(&(*group)[i]);
    }
    csv::write_columns(os, timeseries_header(n), cols);
}

} // namespace lwdip::sim
