#pragma once

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace lwdip::floquet {

using cplx = std::complex<double>;
using Block = Eigen::Matrix4cd;

struct CoupledHOParams {
    double omega0 = 0.0;
    double g = 0.0;
    double eta() const { return g / omega0; }
    void validate() const;  // 0 < eta < 0.5
};

struct DriveSpec {
    double r = 0.0;        // R_M / R0
    double omega_M = 0.0;  // rad/s
    void validate() const; // 0 <= r < 1, omega_M > 0
};

/// g / (1 + r sin(omega_M t))^3
double coupling_waveform(const CoupledHOParams& p, const DriveSpec& d, double t);

/// (1/T) int_T exp(-i m omega_M t) g(t) dt by periodic trapezoid with doubling.
/// Throws NumericError when the requested accuracy is not reached.
cplx fourier_coupling(const CoupledHOParams& p, const DriveSpec& d, int m);

/// g_0 .. g_{max_m}; negative orders follow from g_{-m} = conj(g_m).
std::vector<cplx> fourier_coupling_table(const CoupledHOParams& p, const DriveSpec& d, int max_m,
                                         double rel_tol = 1e-14);

/// Closed-form period average g (1 + r^2/2) / (1 - r^2)^{5/2}.
double renormalized_coupling(double g, double r);

struct FloquetProblem {
    CoupledHOParams params;
    DriveSpec drive;
    int L = 0;
    std::vector<cplx> g_m;  // index m = 0 .. 2L

    cplx coupling(int m) const;  // handles negative m
};

/// Default truncation: max(10, smallest L with |g_{2L}|/g_0 < 1e-8).
int default_truncation(const CoupledHOParams& p, const DriveSpec& d);
FloquetProblem make_problem(const CoupledHOParams& p, const DriveSpec& d, int L = 0);

/// H_m for m = -2L .. 2L, stored at index m + 2L, in units of rad/s.
std::vector<Block> build_h_blocks(const FloquetProblem& problem);

struct Line {
    double omega = 0.0;   // rad/s
    double offset = 0.0;  // (omega - omega0) / omega_M
    double weight = 0.0;  // sideband weight relative to the strongest sideband of its mode
};

struct QuasienergyOptions {
    double weight_threshold = 1e-6;
    double window_halfwidth = 0.0;  // rad/s around omega0; 0 picks 8 omega_M + 4 g
    bool check_convergence = true;
};

struct QuasienergySpectrum {
    std::vector<double> quasienergies;  // distinct values folded into (-omega_M/2, omega_M/2]
    std::vector<Eigen::MatrixXcd> modes;  // one 4 x (2L+1) sideband matrix per representative mode
    std::vector<double> mode_quasienergies;  // unfolded eigenvalue of each representative mode
    std::vector<Line> lines_near_omega0;  // sorted by omega
    int L = 0;                     // truncation the lines were taken from
    double max_imag = 0.0;         // largest |Im eps| over reported modes, rad/s
    double convergence_shift = 0.0; // largest line movement when L is doubled, rad/s
    bool converged = true;
};

double fold(double eps, double omega_M);

/// Eigenvalues of the truncated extended-space matrix. Modes with weight on the
/// outermost sidebands are discarded; L is doubled (up to 128) until every
/// reported line moves by less than 1e-9 omega0 between L and 2L. If that
/// never happens `converged` is false. Throws NumericError when no mode is
/// localized at all.
QuasienergySpectrum quasienergies(const FloquetProblem& problem, const QuasienergyOptions& opts = {});

struct NormalModes {
    double omega_plus = 0.0;
    double omega_minus = 0.0;
};

/// Two oscillators of frequencies omega1, omega2 with coupling g.
NormalModes normal_modes(double omega1, double omega2, double g);
NormalModes normal_modes(const CoupledHOParams& p);

struct SweepPoint {
    double r = 0.0;
    std::optional<QuasienergySpectrum> spectrum;
    std::string error;
    double g0 = 0.0;
    NormalModes dc;           // static g
    NormalModes renormalized; // g -> g_0(r)
};

struct SweepResult {
    CoupledHOParams params;
    double omega_M = 0.0;
    std::vector<SweepPoint> points;
};

SweepResult sweep(const CoupledHOParams& p, std::span<const double> r_grid, double omega_M, int L = 0,
                  const QuasienergyOptions& opts = {}, unsigned threads = 0);

/// r,line_index,quasienergy_rad_s,unfolded_offset_over_omegaM,weight
void write_sweep_csv(std::ostream& os, const SweepResult& s);
/// r,g0_rad_s,dc_plus,dc_minus,renormalized_plus,renormalized_minus (offsets over omega_M)
void write_curves_csv(std::ostream& os, const SweepResult& s);

} // namespace lwdip::floquet
