#pragma once

#include "lwdip/core/vec3.hpp"

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <complex>
#include <vector>

namespace lwdip::greens {

using Tensor = Eigen::Matrix3cd;

/// Free-space (homogeneous background) dyadic Green function sample.
/// Normalisation: E(r) = G(r, r') d / eps0, i.e. G carries the k0^2 prefactor.
struct GreensSample {
    Tensor tensor;       // full G, r != r'
    Tensor transverse;   // G_T
    Tensor longitudinal; // G_L (static dipolar part, delta term dropped off-diagonal)
    Vec3 r;
    Vec3 r_prime;
    double omega = 0;
    double n_B = 1;
};

struct CouplingRates {
    double g12 = 0;          // coherent coupling, rad/s
    double gamma12 = 0;      // incoherent (cross) decay, 1/s
    double gamma0 = 0;       // single-emitter decay of dipole 1, 1/s
    double gamma_plus = 0;   // superradiant, gamma0 + gamma12
    double gamma_minus = 0;  // subradiant, gamma0 - gamma12
};

/// Full G(r, r', omega) for a background of index n_B. Throws SingularityError
/// when |r - r'| is below the exclusion radius; use im_green_coincident there.
GreensSample free_space_green(const Vec3& r, const Vec3& r_prime, double omega, double n_B = 1.0);

/// Im G_ii(r, r, omega) = n_B omega^3 / (6 pi c^3).
double im_green_coincident(double omega, double n_B = 1.0);

/// Emission rate 2 d.Im(G).d / (eps0 hbar) for a (real) dipole vector.
double se_rate(const Vec3& d, const Eigen::Matrix3d& im_green);

/// Emission rate in a homogeneous medium, built from im_green_coincident.
double se_rate_homogeneous(const Vec3& d, double omega, double n_B = 1.0);

CouplingRates coupling_rates(const Vec3& d1, const Vec3& d2, const Vec3& R1, const Vec3& R2, double omega,
                             double n_B = 1.0);

/// Retardation-free estimate d1 d2 / (4 pi eps0 hbar R^3) for parallel dipoles
/// perpendicular to the separation.
double near_field_coupling(double d1, double d2, double R);

/// Oscillating point dipole d(t) = Re[d0 exp(-i omega t)] at the origin, observed at R.
struct DipoleFields {
    Vec3 E;
    Vec3 B;
};

/// Complex amplitudes of E and B (multiply by exp(-i omega t) and take the real part).
struct DipolePhasors {
    Eigen::Vector3cd E;
    Eigen::Vector3cd B;
};

DipolePhasors dipole_field_phasors(const Vec3& d0, double omega, const Vec3& R);
DipoleFields analytic_dipole_fields(const Vec3& d0, double omega, const Vec3& R, double t);

/// Lossless Lorentz polarizability 2 omega_n d^2 / (eps0 hbar (omega_n^2 - omega^2)), m^3.
/// Throws PoleError at omega == omega_n.
double polarizability(double d, double omega_n, double omega);

struct Scatterer {
    Vec3 position;
    Vec3 orientation;       // unit vector
    std::complex<double> alpha;
};

struct DysonResult {
    Tensor tensor;                     // G^(2)(R1, R2, omega)
    std::complex<double> denominator;  // 1 - G21 alpha1 G12 alpha2 (projected)
};

/// Two-scatterer Green function G^(2)(R1, R2) with the scatterers' self-interaction
/// neglected. With `lossless` the background propagator between the scatterers
/// is replaced by its real part, making the denominator real for real alphas.
DysonResult dyson_two_scatterer(const Scatterer& s1, const Scatterer& s2, double omega, bool lossless = false,
                                double n_B = 1.0);

/// Real-frequency zeros of the lossless two-scatterer denominator for two identical
/// Lorentz dipoles (moment d, resonance omega_n) in [omega_lo, omega_hi], located by
/// sign-change scan plus bisection to rel_tol * omega_n.
std::vector<double> dyson_poles(double d, double omega_n, const Vec3& R1, const Vec3& R2, const Vec3& orientation,
                                double omega_lo, double omega_hi, double rel_tol = 1e-12);

} // namespace lwdip::greens
