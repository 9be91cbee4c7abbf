#pragma once

namespace lwdip {

/// Derived parameters of one Lorentz-oscillator dipole, all SI.
struct DipoleParams {
    double q = 0.0;       // charge magnitude (C)
    double y0 = 0.0;      // maximum internal displacement (m)
    double omega0 = 0.0;  // angular resonance frequency (rad/s)
    double m_eff = 0.0;   // effective (reduced) mass (kg)
    double d0 = 0.0;      // initial dipole moment q*y0 (C m)
    double gamma0 = 0.0;  // free-space decay rate (1/s)
};

/// Builds DipoleParams from (q, y0, omega0). The effective mass follows the
/// quantum correspondence m_eff = hbar / (2 omega0 y0^2), and gamma0 is the
/// free-space rate d0^2 omega0^3 / (3 pi eps0 hbar c^3).
/// Throws DomainError naming the first non-positive argument.
DipoleParams derive_dipole_params(double q, double y0, double omega0);

/// gamma0 from the dipole-moment form d^2 omega^3 / (3 pi eps0 hbar c^3).
double decay_rate_dipole_form(double d, double omega0);

/// gamma0 from the classical mass form q^2 omega^2 / (6 pi eps0 m c^3).
double decay_rate_mass_form(double q, double m_eff, double omega0);

/// Converts an ordinary frequency (Hz) to angular frequency (rad/s).
constexpr double angular_from_hz(double f) { return 2.0 * 3.14159265358979323846 * f; }

} // namespace lwdip
