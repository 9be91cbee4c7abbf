#include "lwdip/core/dipole_params.hpp"

#include "lwdip/core/constants.hpp"
#include "lwdip/core/errors.hpp"

#include <cmath>
#include <string>

namespace lwdip {

namespace {

void require_positive(double value, const char* name) {
    if (!(value > 0.0) || !std::isfinite(value)) {
        throw DomainError(std::string("derive_dipole_params: ") + name + " must be positive and finite, got " +
                          std::to_string(value));
    }
}

} // namespace

double decay_rate_dipole_form(double d, double omega0) {
    using namespace constants;
    return d * d * omega0 * omega0 * omega0 / (3.0 * pi * eps0 * hbar * c * c * c);
}

double decay_rate_mass_form(double q, double m_eff, double omega0) {
    using namespace constants;
    return q * q * omega0 * omega0 / (6.0 * pi * eps0 * m_eff * c * c * c);
}

DipoleParams derive_dipole_params(double q, double y0, double omega0) {
    require_positive(q, "q");
    require_positive(y0, "y0");
    require_positive(omega0, "omega0");

    DipoleParams p;
    p.q = q;
    p.y0 = y0;
    p.omega0 = omega0;
    p.m_eff = constants::hbar / (2.0 * omega0 * y0 * y0);
    p.d0 = q * y0;
    p.gamma0 = decay_rate_dipole_form(p.d0, omega0);
    return p;
}

} // namespace lwdip
