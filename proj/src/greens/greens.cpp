#include "lwdip/greens/greens.hpp"

#include "lwdip/core/constants.hpp"
#include "lwdip/core/errors.hpp"

#include <cmath>
#include <sstream>

namespace lwdip::greens {

namespace {

using cd = std::complex<double>;
using constants::c;
using constants::eps0;
using constants::hbar;
using constants::pi;

Eigen::Vector3d to_eigen(const Vec3& v) { return {v.x, v.y, v.z}; }

} // namespace

GreensSample free_space_green(const Vec3& r, const Vec3& r_prime, double omega, double n_B) {
    const Vec3 sep = r - r_prime;
    const double R = norm(sep);
    if (R < constants::exclusion_radius) {
        std::ostringstream msg;
        msg << "free_space_green: coincident points (|r - r'| = " << R
            << " m); use im_green_coincident for the local density of states";
        throw SingularityError(msg.str());
    }
    const double k0 = omega / c;
    const double kB = n_B * k0;
    const double x = kB * R;
    const Eigen::Vector3d n = to_eigen(sep / R);
    const Eigen::Matrix3d nn = n * n.transpose();
    const Eigen::Matrix3d I = Eigen::Matrix3d::Identity();

    const cd ix(0.0, x);
    const cd prefactor = k0 * k0 * std::exp(ix) / (4.0 * pi * R);
    const cd a = 1.0 + (ix - 1.0) / (x * x);
    const cd b = (3.0 - 3.0 * ix - x * x) / (x * x);

    GreensSample s;
    s.r = r;
    s.r_prime = r_prime;
    s.omega = omega;
    s.n_B = n_B;
    s.tensor = prefactor * (a * I.cast<cd>() + b * nn.cast<cd>());
    s.longitudinal = ((3.0 * nn - I) / (4.0 * pi * n_B * n_B * R * R * R)).cast<cd>();
    s.transverse = s.tensor - s.longitudinal;
    return s;
}

double im_green_coincident(double omega, double n_B) {
    return n_B * omega * omega * omega / (6.0 * pi * c * c * c);
}

double se_rate(const Vec3& d, const Eigen::Matrix3d& im_green) {
    const Eigen::Vector3d dv = to_eigen(d);
    return 2.0 * dv.dot(im_green * dv) / (eps0 * hbar);
}

double se_rate_homogeneous(const Vec3& d, double omega, double n_B) {
    return se_rate(d, im_green_coincident(omega, n_B) * Eigen::Matrix3d::Identity());
}

CouplingRates coupling_rates(const Vec3& d1, const Vec3& d2, const Vec3& R1, const Vec3& R2, double omega,
                             double n_B) {
    const GreensSample G = free_space_green(R1, R2, omega, n_B);
    const Eigen::Vector3d a = to_eigen(d1);
    const Eigen::Vector3d b = to_eigen(d2);
    const Eigen::Matrix3d re = G.tensor.real();
    const Eigen::Matrix3d im = G.tensor.imag();

    CouplingRates out;
    out.g12 = -a.dot(re * b) / (eps0 * hbar);
    out.gamma12 = 2.0 * a.dot(im * b) / (eps0 * hbar);
    out.gamma0 = se_rate_homogeneous(d1, omega, n_B);
    out.gamma_plus = out.gamma0 + out.gamma12;
    out.gamma_minus = out.gamma0 - out.gamma12;
    return out;
}

double near_field_coupling(double d1, double d2, double R) {
    return d1 * d2 / (4.0 * pi * eps0 * hbar * R * R * R);
}

DipolePhasors dipole_field_phasors(const Vec3& d0, double omega, const Vec3& R) {
    const double dist = norm(R);
    if (dist < constants::exclusion_radius) throw SingularityError("analytic_dipole_fields: R = 0");
    const double k = omega / c;
    const Eigen::Vector3cd n = to_eigen(R / dist).cast<cd>();
    const Eigen::Vector3cd d = to_eigen(d0).cast<cd>();
    const cd phase = std::exp(cd(0.0, k * dist));

    const Eigen::Vector3cd far = k * k * (n.cross(d)).cross(n) * phase / dist;
    const Eigen::Vector3cd near = (3.0 * n.dot(d) * n - d) * (1.0 / (dist * dist * dist) - cd(0.0, k) / (dist * dist)) *
                                  phase;

    DipolePhasors out;
    out.E = (far + near) / (4.0 * pi * eps0);
    out.B = constants::mu0 / (4.0 * pi) * c * k * k * n.cross(d) * (1.0 - 1.0 / cd(0.0, k * dist)) * phase / dist;
    return out;
}

DipoleFields analytic_dipole_fields(const Vec3& d0, double omega, const Vec3& R, double t) {
    const DipolePhasors p = dipole_field_phasors(d0, omega, R);
    const cd rot = std::exp(cd(0.0, -omega * t));
    const Eigen::Vector3d E = (p.E * rot).real();
    const Eigen::Vector3d B = (p.B * rot).real();
    return {{E.x(), E.y(), E.z()}, {B.x(), B.y(), B.z()}};
}

double polarizability(double d, double omega_n, double omega) {
    const double denom = omega_n * omega_n - omega * omega;
    if (denom == 0.0) throw PoleError("polarizability: evaluated on the resonance omega == omega_n", denom);
    return 2.0 * omega_n * d * d / (eps0 * hbar * denom);
}

DysonResult dyson_two_scatterer(const Scatterer& s1, const Scatterer& s2, double omega, bool lossless, double n_B) {
    Tensor G12 = free_space_green(s1.position, s2.position, omega, n_B).tensor;
    Tensor G21 = free_space_green(s2.position, s1.position, omega, n_B).tensor;
    if (lossless) {
        G12 = G12.real().cast<cd>();
        G21 = G21.real().cast<cd>();
    }
    const Eigen::Vector3cd e1 = to_eigen(s1.orientation).cast<cd>();
    const Eigen::Vector3cd e2 = to_eigen(s2.orientation).cast<cd>();
    const cd g12 = e1.dot(G12 * e2);  // Eigen's dot conjugates the left operand; e1 is real
    const cd g21 = e2.dot(G21 * e1);

    DysonResult out;
    out.denominator = 1.0 - g21 * s1.alpha * g12 * s2.alpha;
    if (std::abs(out.denominator) == 0.0) {
        throw PoleError("dyson_two_scatterer: evaluated on a hybrid pole", std::abs(out.denominator));
    }
    out.tensor = G12 / out.denominator;
    return out;
}

std::vector<double> dyson_poles(double d, double omega_n, const Vec3& R1, const Vec3& R2, const Vec3& orientation,
                                double omega_lo, double omega_hi, double rel_tol) {
    if (!(omega_hi > omega_lo)) throw DomainError("dyson_poles: empty frequency window");

    auto denominator = [&](double w) {
        const double a = polarizability(d, omega_n, w);
        const DysonResult r = dyson_two_scatterer({R1, orientation, a}, {R2, orientation, a}, w, true);
        return r.denominator.real();
    };
    // Nudge grid points that land exactly on the bare resonance.
    auto safe = [&](double w) { return w == omega_n ? w * (1.0 + 1e-9) : w; };

    constexpr int kScan = 4000;
    const double step = (omega_hi - omega_lo) / kScan;
    std::vector<double> poles;
    double w_prev = safe(omega_lo);
    double f_prev = denominator(w_prev);
    for (int i = 1; i <= kScan; ++i) {
        const double w = safe(omega_lo + step * i);
        const double f = denominator(w);
        if ((f_prev > 0.0) != (f > 0.0)) {
            double lo = w_prev;
            double hi = w;
            double f_lo = f_prev;
            while (hi - lo > rel_tol * omega_n) {
                const double mid = safe(0.5 * (lo + hi));
                const double f_mid = denominator(mid);
                if ((f_mid > 0.0) == (f_lo > 0.0)) {
                    lo = mid;
                    f_lo = f_mid;
                } else {
                    hi = mid;
                }
            }
            poles.push_back(0.5 * (lo + hi));
        }
        w_prev = w;
        f_prev = f;
    }
    return poles;
}

} // namespace lwdip::greens
