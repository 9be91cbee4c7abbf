#include "lwdip/floquet/floquet.hpp"

#include "lwdip/core/constants.hpp"
#include "lwdip/core/csv.hpp"
#include "lwdip/core/errors.hpp"
#include "lwdip/core/parallel.hpp"

#include <Eigen/Eigenvalues>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace lwdip::floquet {

using constants::pi;

void CoupledHOParams::validate() const {
    if (!(omega0 > 0.0)) throw DomainError("omega0 must be positive");
    const double e = eta();
    if (!(e > 0.0 && e < 0.5)) throw DomainError(fmt::format("eta = g/omega0 must lie in (0, 0.5), got {}", e));
}

void DriveSpec::validate() const {
    if (!(r >= 0.0 && r < 1.0)) throw DomainError(fmt::format("R_M/R0 must lie in [0, 1), got {}", r));
    if (!(omega_M > 0.0)) throw DomainError("omega_M must be positive");
}

double coupling_waveform(const CoupledHOParams& p, const DriveSpec& d, double t) {
    const double s = 1.0 + d.r * std::sin(d.omega_M * t);
    return p.g / (s * s * s);
}

double renormalized_coupling(double g, double r) {
    const double q = 1.0 - r * r;
    return g * (1.0 + 0.5 * r * r) / (q * q * std::sqrt(q));
}

std::vector<cplx> fourier_coupling_table(const CoupledHOParams& p, const DriveSpec& d, int max_m, double rel_tol) {
    d.validate();
    if (max_m < 0) throw DomainError("fourier_coupling_table: max_m must be non-negative");

    // The integrand is analytic and periodic, so the equispaced rule converges
    // geometrically; stop once doubling the node count changes nothing.
    auto evaluate = [&](std::size_t n) {
        std::vector<cplx> c(static_cast<std::size_t>(max_m) + 1, 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            const double theta = 2.0 * pi * static_cast<double>(j) / static_cast<double>(n);
            const double s = 1.0 + d.r * std::sin(theta);
            const double w = 1.0 / (s * s * s);
            for (int m = 0; m <= max_m; ++m) c[m] += w * std::polar(1.0, -m * theta);
        }
        for (auto& v : c) v *= p.g / static_cast<double>(n);
        return c;
    };

    std::size_t n = 64;
    while (n < 4 * static_cast<std::size_t>(max_m) + 8) n *= 2;
    std::vector<cplx> prev = evaluate(n);
    constexpr std::size_t n_max = std::size_t{1} << 22;
    double change = std::numeric_limits<double>::infinity();
    while (n < n_max) {
        n *= 2;
        std::vector<cplx> next = evaluate(n);
        change = 0.0;
        for (std::size_t m = 0; m < next.size(); ++m) change = std::max(change, std::abs(next[m] - prev[m]));
        prev = std::move(next);
        const double scale = std::abs(p.g) > 0.0 ? std::abs(prev[0]) : 1.0;
        if (change <= rel_tol * scale) return prev;
    }
    throw NumericError(fmt::format("g_m quadrature did not converge (last change {:.3e})", change), change);
}

cplx fourier_coupling(const CoupledHOParams& p, const DriveSpec& d, int m) {
    const auto table = fourier_coupling_table(p, d, std::abs(m));
    const cplx v = table[static_cast<std::size_t>(std::abs(m))];
    return m >= 0 ? v : std::conj(v);
}

cplx FloquetProblem::coupling(int m) const {
    const auto k = static_cast<std::size_t>(std::abs(m));
    if (k >= g_m.size()) return 0.0;
    return m >= 0 ? g_m[k] : std::conj(g_m[k]);
}

int default_truncation(const CoupledHOParams& p, const DriveSpec& d) {
    if (d.r == 0.0) return 10;
    // |g_m| ~ rho^m with rho = (1 - sqrt(1 - r^2)) / r; confirm on the actual table.
    const double rho = (1.0 - std::sqrt(1.0 - d.r * d.r)) / d.r;
    int L = std::max(10, static_cast<int>(std::ceil(std::log(1e-8) / std::log(rho) / 2.0)));
    for (;;) {
        const auto t = fourier_coupling_table(p, d, 2 * L);
        if (std::abs(t[2 * L]) < 1e-8 * std::abs(t[0])) break;
        ++L;
        if (L > 400) throw NumericError("sideband truncation does not converge", std::abs(t[2 * L - 2]));
    }
    // Walk back down: the estimate above can overshoot.
    while (L > 10) {
        const auto t = fourier_coupling_table(p, d, 2 * (L - 1));
        if (std::abs(t[2 * (L - 1)]) < 1e-8 * std::abs(t[0])) --L;
        else break;
    }
    return L;
}

FloquetProblem make_problem(const CoupledHOParams& p, const DriveSpec& d, int L) {
    p.validate();
    d.validate();
    FloquetProblem fp;
    fp.params = p;
    fp.drive = d;
    fp.L = L > 0 ? L : default_truncation(p, d);
    fp.g_m = fourier_coupling_table(p, d, 2 * fp.L);
    return fp;
}

std::vector<Block> build_h_blocks(const FloquetProblem& pr) {
    const int M = 2 * pr.L;
    std::vector<Block> blocks(static_cast<std::size_t>(2 * M + 1));
    for (int m = -M; m <= M; ++m) {
        const cplx gm = pr.coupling(m);
        const double w = m == 0 ? pr.params.omega0 : 0.0;
        Block h;
        h << w, gm, 0.0, gm,
             gm, w, gm, 0.0,
             0.0, -gm, -w, -gm,
             -gm, 0.0, -gm, -w;
        blocks[static_cast<std::size_t>(m + M)] = h;
    }
    return blocks;
}

double fold(double eps, double omega_M) {
    double f = eps - omega_M * std::round(eps / omega_M);
    if (f <= -0.5 * omega_M) f += omega_M;
    if (f > 0.5 * omega_M) f -= omega_M;
    return f;
}

namespace {

constexpr int kMaxTruncation = 128;
constexpr double kEdgeWeight = 1e-6;  // outermost-sideband weight above which a mode is a truncation artifact

struct NoBulkModes {};

struct RawSpectrum {
    std::vector<double> folded;
    std::vector<Eigen::MatrixXcd> modes;
    std::vector<double> mode_eps;
    std::vector<Line> lines;
    double max_imag = 0.0;
};

RawSpectrum solve(const FloquetProblem& pr, const QuasienergyOptions& opts) {
    const int L = pr.L;
    const int nl = 2 * L + 1;
    const int dim = 4 * nl;
    const double w0 = pr.params.omega0;
    const double wM = pr.drive.omega_M;
    const auto blocks = build_h_blocks(pr);
    const int M = 2 * L;

    // Work in units of omega0 to keep the matrix well scaled.
    Eigen::MatrixXcd K = Eigen::MatrixXcd::Zero(dim, dim);
    for (int a = 0; a < nl; ++a) {
        for (int b = 0; b < nl; ++b) {
            const int m = a - b;
            if (std::abs(m) > M) continue;
            K.block<4, 4>(4 * a, 4 * b) = blocks[static_cast<std::size_t>(m + M)] / w0;
        }
        const double shift = (a - L) * wM / w0;
        for (int i = 0; i < 4; ++i) K(4 * a + i, 4 * a + i) += shift;
    }

    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(K, true);
    if (es.info() != Eigen::Success) throw NumericError("Floquet eigen-solver failed", 0.0);

    const double halfwidth = opts.window_halfwidth > 0.0 ? opts.window_halfwidth : 8.0 * wM + 4.0 * pr.params.g;
    const double merge_tol = 1e-11 * w0;

    struct Candidate {
        double eps;
        double centroid;
        Eigen::MatrixXcd F;
    };
    std::vector<Candidate> bulk;
    RawSpectrum out;

    for (int k = 0; k < dim; ++k) {
        const cplx ev = es.eigenvalues()[k] * w0;
        const Eigen::VectorXcd v = es.eigenvectors().col(k);
        Eigen::MatrixXcd F(4, nl);
        std::vector<double> w(static_cast<std::size_t>(nl));
        double total = 0.0, centroid = 0.0;
        for (int a = 0; a < nl; ++a) {
            F.col(a) = v.segment<4>(4 * a);
            w[a] = F.col(a).squaredNorm();
            total += w[a];
            centroid += (a - L) * w[a];
        }
        if (total <= 0.0) continue;
        centroid /= total;
        // Modes that lean on the truncation boundary are artifacts of the finite space.
        const double edge = (w.front() + w.back()) / total;
        if (edge > kEdgeWeight) continue;
        bulk.push_back({ev.real(), centroid, F});
        out.max_imag = std::max(out.max_imag, std::abs(ev.imag()));

        const double wmax = *std::max_element(w.begin(), w.end());
        for (int a = 0; a < nl; ++a) {
            const double rel = w[a] / wmax;
            if (rel < opts.weight_threshold) continue;
            // Component at sideband index l oscillates as exp(-i (eps - l omega_M) t).
            const double omega = ev.real() - (a - L) * wM;
            if (std::abs(omega - w0) > halfwidth) continue;
            auto same = std::find_if(out.lines.begin(), out.lines.end(),
                                     [&](const Line& ln) { return std::abs(ln.omega - omega) <= merge_tol; });
            if (same == out.lines.end()) out.lines.push_back({omega, (omega - w0) / wM, rel});
            else same->weight = std::max(same->weight, rel);
        }
    }
    if (bulk.empty()) throw NoBulkModes{};

    // Representatives: the most central copy of each distinct folded value.
    std::sort(bulk.begin(), bulk.end(),
              [](const Candidate& a, const Candidate& b) { return std::abs(a.centroid) < std::abs(b.centroid); });
    for (const auto& c : bulk) {
        const double f = fold(c.eps, wM);
        const bool seen = std::any_of(out.folded.begin(), out.folded.end(), [&](double x) {
            const double d = std::abs(x - f);
            return std::min(d, wM - d) <= merge_tol;
        });
        if (seen) continue;
        out.folded.push_back(f);
        out.modes.push_back(c.F);
        out.mode_eps.push_back(c.eps);
    }
    std::sort(out.lines.begin(), out.lines.end(), [](const Line& a, const Line& b) { return a.omega < b.omega; });
    return out;
}

} // namespace

QuasienergySpectrum quasienergies(const FloquetProblem& pr, const QuasienergyOptions& opts) {
    if (pr.L < 1) throw DomainError("quasienergies: L must be at least 1");

    auto with_L = [&](int L) {
        FloquetProblem p = pr;
        p.L = L;
        p.g_m = fourier_coupling_table(pr.params, pr.drive, 2 * L);
        return p;
    };
    auto try_solve = [&](const FloquetProblem& p) -> std::optional<RawSpectrum> {
        try {
            return solve(p, opts);
        } catch (const NoBulkModes&) {
            return std::nullopt;
        }
    };
    auto line_shift = [](const RawSpectrum& a, const RawSpectrum& b) {
        double shift = 0.0;
        for (const Line& ln : a.lines) {
            double best = std::numeric_limits<double>::infinity();
            for (const Line& r : b.lines) best = std::min(best, std::abs(r.omega - ln.omega));
            shift = std::max(shift, best);
        }
        return shift;
    };

    // Wide modes (large r, slow drives) spill over a fixed truncation, so the
    // space is doubled until the reported lines stop moving.
    const double tol = 1e-9 * pr.params.omega0;
    FloquetProblem cur = pr;
    std::optional<RawSpectrum> raw = try_solve(cur);
    double shift = std::numeric_limits<double>::infinity();
    bool converged = false;
    while (2 * cur.L <= kMaxTruncation) {
        if (raw && !opts.check_convergence) break;
        FloquetProblem next = with_L(2 * cur.L);
        std::optional<RawSpectrum> ref = try_solve(next);
        if (raw && ref) {
            shift = line_shift(*raw, *ref);
            if (shift <= tol) {
                converged = true;
                break;
            }
        }
        cur = std::move(next);
        raw = std::move(ref);
    }
    if (!raw) {
        throw NumericError(fmt::format("no Floquet mode is localized inside the truncated space (L = {})", cur.L),
                           shift);
    }

    QuasienergySpectrum s;
    s.L = cur.L;
    s.quasienergies = raw->folded;
    std::sort(s.quasienergies.begin(), s.quasienergies.end());
    s.modes = std::move(raw->modes);
    s.mode_quasienergies = std::move(raw->mode_eps);
    s.lines_near_omega0 = std::move(raw->lines);
    s.max_imag = raw->max_imag;
    s.convergence_shift = opts.check_convergence ? shift : 0.0;
    s.converged = opts.check_convergence ? converged : true;
    if (s.max_imag > 1e-10 * pr.params.omega0) s.converged = false;
    return s;
}

NormalModes normal_modes(double omega1, double omega2, double g) {
    if (!(omega1 > 0.0 && omega2 > 0.0)) throw DomainError("normal_modes: frequencies must be positive");
    const double mean = 0.5 * (omega1 * omega1 + omega2 * omega2);
    const double diff = omega1 * omega1 - omega2 * omega2;
    const double root = 0.5 * std::sqrt(diff * diff + 16.0 * g * g * omega1 * omega2);
    if (!(mean - root > 0.0)) throw DomainError("normal_modes: coupling too strong, lower mode is not real");
    return {std::sqrt(mean + root), std::sqrt(mean - root)};
}

NormalModes normal_modes(const CoupledHOParams& p) {
    if (!(2.0 * p.g < p.omega0)) throw DomainError("normal_modes: requires 2g < omega0");
    return normal_modes(p.omega0, p.omega0, p.g);
}

SweepResult sweep(const CoupledHOParams& p, std::span<const double> r_grid, double omega_M, int L,
                  const QuasienergyOptions& opts, unsigned threads) {
    p.validate();
    SweepResult out;
    out.params = p;
    out.omega_M = omega_M;
    out.points.resize(r_grid.size());
    out.points.shrink_to_fit();
    parallel_for(r_grid.size(), threads == 0 ? default_thread_count() : threads, [&](std::size_t i) {
        SweepPoint& pt = out.points[i];
        pt.r = r_grid[i];
        try {
            const DriveSpec d{pt.r, omega_M};
            d.validate();
            pt.dc = normal_modes(p);
            pt.g0 = renormalized_coupling(p.g, pt.r);
            pt.renormalized = normal_modes(p.omega0, p.omega0, pt.g0);
            pt.spectrum = quasienergies(make_problem(p, d, L), opts);
        } catch (const std::exception& e) {
            pt.error = e.what();
        }
    });
    return out;
}

void write_sweep_csv(std::ostream& os, const SweepResult& s) {
    os << "r,line_index,quasienergy_rad_s,unfolded_offset_over_omegaM,weight\n";
    for (const auto& pt : s.points) {
        if (!pt.spectrum) {
            os << csv::format_double(pt.r) << ",-1,nan,nan,nan\n";
            continue;
        }
        const auto& lines = pt.spectrum->lines_near_omega0;
        for (std::size_t i = 0; i < lines.size(); ++i) {
            os << csv::format_double(pt.r) << ',' << i << ',' << csv::format_double(lines[i].omega) << ','
               << csv::format_double(lines[i].offset) << ',' << csv::format_double(lines[i].weight) << '\n';
        }
    }
}

void write_curves_csv(std::ostream& os, const SweepResult& s) {
    os << "r,g0_rad_s,dc_plus,dc_minus,renormalized_plus,renormalized_minus\n";
    const double w0 = s.params.omega0;
    const double wM = s.omega_M;
    for (const auto& pt : s.points) {
        if (!pt.error.empty() && pt.g0 == 0.0) {
            os << csv::format_double(pt.r) << ",nan,nan,nan,nan,nan\n";
            continue;
        }
        os << csv::format_double(pt.r) << ',' << csv::format_double(pt.g0) << ','
           << csv::format_double((pt.dc.omega_plus - w0) / wM) << ','
           << csv::format_double((pt.dc.omega_minus - w0) / wM) << ','
           << csv::format_double((pt.renormalized.omega_plus - w0) / wM) << ','
           << csv::format_double((pt.renormalized.omega_minus - w0) / wM) << '\n';
    }
}

} // namespace lwdip::floquet
