#include "lwdip/spectra/spectra.hpp"

#include "lwdip/core/constants.hpp"
#include "lwdip/core/csv.hpp"
#include "lwdip/core/errors.hpp"

#include <fftw3.h>
#include <fmt/format.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <memory>
#include <mutex>
#include <iterator>
#include <limits>
#include <numeric>
#include <ostream>

namespace lwdip::spectra {

namespace {

std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

struct FftwFree {
    void operator()(void* p) const { fftw_free(p); }
};

std::vector<double> detrended_windowed(std::span<const double> series) {
    const std::size_t n = series.size();
    const double mean = std::accumulate(series.begin(), series.end(), 0.0) / static_cast<double>(n);
    const std::vector<double> w = hamming_window(n);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = w[i] * (series[i] - mean);
    return out;
}

// For each index, the minimum of values on (previous strictly-greater index, i].
// Runs in O(n) with a monotone stack; the reverse pass gives the right side.
std::vector<double> left_base_minima(const std::vector<double>& v) {
    struct Entry {
        std::size_t index;
        double segment_min;
    };
    std::vector<Entry> stack;
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        double m = v[i];
        while (!stack.empty() && v[stack.back().index] <= v[i]) {
            m = std::min(m, stack.back().segment_min);
            stack.pop_back();
        }
        out[i] = m;
        stack.push_back({i, m});
    }
    return out;
}

} // namespace

std::vector<double> hamming_window(std::size_t n) {
    std::vector<double> w(n, 1.0);
    if (n < 2) return w;
    const double denom = static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) w[i] = 0.54 - 0.46 * std::cos(2.0 * constants::pi * i / denom);
    return w;
}

SpectrumResult windowed_fft(std::span<const double> series, double dt_effective, std::optional<AxisScale> scale) {
    if (series.size() < 16) throw DomainError("windowed_fft: series needs at least 16 samples");
    if (!(dt_effective > 0.0)) throw DomainError("windowed_fft: dt_effective must be positive");

    const std::size_t n = series.size();
    const std::size_t n_fft = 4 * std::bit_ceil(n);
    const std::size_t n_out = n_fft / 2 + 1;

    std::unique_ptr<double, FftwFree> in(static_cast<double*>(fftw_malloc(sizeof(double) * n_fft)));
    std::unique_ptr<fftw_complex, FftwFree> out(
        static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n_out)));
    fftw_plan plan;
    {
        std::lock_guard lock(planner_mutex());
        plan = fftw_plan_dft_r2c_1d(static_cast<int>(n_fft), in.get(), out.get(), FFTW_ESTIMATE);
    }
    const std::vector<double> x = detrended_windowed(series);
    std::copy(x.begin(), x.end(), in.get());
    std::fill(in.get() + n, in.get() + n_fft, 0.0);
    fftw_execute(plan);
    {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(plan);
    }

    SpectrumResult s;
    s.n_samples = n;
    s.fft_length = n_fft;
    s.bin_width = 2.0 * constants::pi / (dt_effective * static_cast<double>(n));
    s.axis_step = 2.0 * constants::pi / (dt_effective * static_cast<double>(n_fft));
    s.scale = scale;
    s.freq_axis.resize(n_out);
    s.magnitude.resize(n_out);
    for (std::size_t k = 0; k < n_out; ++k) {
        s.freq_axis[k] = s.axis_step * static_cast<double>(k);
        s.magnitude[k] = std::hypot(out.get()[k][0], out.get()[k][1]);
    }
    if (scale) {
        s.normalized_axis.resize(n_out);
        for (std::size_t k = 0; k < n_out; ++k) {
            s.normalized_axis[k] = (s.freq_axis[k] - scale->omega0) / scale->omega_M;
        }
    }
    return s;
}

SpectrumResult find_peaks(SpectrumResult s, double prominence_threshold) {
    s.peaks.clear();
    s.prominence_threshold = prominence_threshold;
    const auto& v = s.magnitude;
    if (v.size() < 3) return s;

    const double vmax = *std::max_element(v.begin(), v.end());
    const double cut = prominence_threshold * vmax;

    const std::vector<double> left = left_base_minima(v);
    std::vector<double> reversed(v.rbegin(), v.rend());
    std::vector<double> right = left_base_minima(reversed);
    std::reverse(right.begin(), right.end());

    for (std::size_t i = 1; i + 1 < v.size(); ++i) {
        if (!(v[i] > v[i - 1] && v[i] >= v[i + 1])) continue;
        const double prominence = v[i] - std::max(left[i], right[i]);
        if (prominence < cut || prominence <= 0.0) continue;

        const double a = v[i - 1], b = v[i], c = v[i + 1];
        const double curvature = a - 2.0 * b + c;
        double delta = 0.0;
        if (curvature < 0.0) delta = std::clamp(0.5 * (a - c) / curvature, -0.5, 0.5);

        Peak p;
        p.position = (static_cast<double>(i) + delta) * s.axis_step;
        p.height = b - 0.25 * (a - c) * delta;
        p.prominence = prominence;
        if (s.scale) p.normalized_offset = (p.position - s.scale->omega0) / s.scale->omega_M;
        s.peaks.push_back(p);
    }
    return s;
}

double windowed_energy(std::span<const double> series) {
    const std::vector<double> x = detrended_windowed(series);
    return std::inner_product(x.begin(), x.end(), x.begin(), 0.0);
}

double spectrum_energy(const SpectrumResult& s) {
    const auto& m = s.magnitude;
    if (m.empty()) return 0.0;
    double sum = m.front() * m.front();
    const std::size_t last = m.size() - 1;
    for (std::size_t k = 1; k < last; ++k) sum += 2.0 * m[k] * m[k];
    sum += m[last] * m[last];
    return sum / static_cast<double>(s.fft_length);
}

std::vector<Peak> major_peaks(const SpectrumResult& s) {
    if (s.magnitude.empty()) return {};
    const double vmax = *std::max_element(s.magnitude.begin(), s.magnitude.end());
    const double cut = 10.0 * s.prominence_threshold * vmax;
    std::vector<Peak> out;
    std::copy_if(s.peaks.begin(), s.peaks.end(), std::back_inserter(out),
                 [cut](const Peak& p) { return p.prominence >= cut; });
    return out;
}

MatchReport compare_to_floquet(const SpectrumResult& s, std::span<const double> lines, double tolerance_bins) {
    MatchReport report;
    report.tolerance_bins = tolerance_bins;
    report.pass = true;
    const double vmax = s.magnitude.empty() ? 0.0 : *std::max_element(s.magnitude.begin(), s.magnitude.end());
    const double major_cut = 10.0 * s.prominence_threshold * vmax;

    for (const Peak& p : s.peaks) {
        LineMatch m;
        m.peak = p;
        m.major = p.prominence >= major_cut;
        if (lines.empty()) {
            m.nearest_line = std::numeric_limits<double>::quiet_NaN();
            m.offset_bins = std::numeric_limits<double>::infinity();
        } else {
            const auto best = std::min_element(lines.begin(), lines.end(), [&](double a, double b) {
                return std::abs(a - p.position) < std::abs(b - p.position);
            });
            m.nearest_line = *best;
            m.offset_bins = (p.position - *best) / s.bin_width;
        }
        m.within_tolerance = std::abs(m.offset_bins) <= tolerance_bins;
        if (m.major && !m.within_tolerance) report.pass = false;
        report.matches.push_back(m);
    }
    return report;
}

ResidueClusters cluster_residues(std::span<const double> positions, double period, double radius) {
    if (!(period > 0.0)) throw DomainError("cluster_residues: period must be positive");
    auto residue = [period](double x) {
        double r = std::fmod(x, period);
        return r < 0.0 ? r + period : r;
    };
    auto circular = [period](double a, double b) {
        const double d = std::abs(a - b);
        return std::min(d, period - d);
    };

    ResidueClusters out;
    for (double x : positions) {
        const double r = residue(x);
        std::size_t chosen = out.centers.size();
        for (std::size_t c = 0; c < out.centers.size(); ++c) {
            if (circular(r, out.centers[c]) <= radius) {
                chosen = c;
                break;
            }
        }
        if (chosen == out.centers.size()) out.centers.push_back(r);
        out.assignment.push_back(chosen);
        out.max_distance = std::max(out.max_distance, circular(r, out.centers[chosen]));
    }
    return out;
}

void write_spectrum_csv(std::ostream& os, const SpectrumResult& s) {
    os << "omega_rad_s,normalized_offset,magnitude\n";
    for (std::size_t k = 0; k < s.magnitude.size(); ++k) {
        const double off = s.normalized_axis.empty() ? 0.0 : s.normalized_axis[k];
        os << csv::format_double(s.freq_axis[k]) << ',' << csv::format_double(off) << ','
           << csv::format_double(s.magnitude[k]) << '\n';
    }
}

void write_peaks_csv(std::ostream& os, const SpectrumResult& s) {
    os << "position_rad_s,normalized_offset,height,prominence\n";
    for (const Peak& p : s.peaks) {
        os << csv::format_double(p.position) << ',' << csv::format_double(p.normalized_offset) << ','
           << csv::format_double(p.height) << ',' << csv::format_double(p.prominence) << '\n';
    }
}

void write_match_report(std::ostream& os, const MatchReport& r) {
    os << fmt::format("tolerance_bins = {}\n", r.tolerance_bins);
    os << "position_rad_s nearest_line_rad_s offset_bins major within\n";
    for (const LineMatch& m : r.matches) {
        os << fmt::format("{:.17g} {:.17g} {:+.4f} {} {}\n", m.peak.position, m.nearest_line, m.offset_bins,
                          m.major ? "major" : "minor", m.within_tolerance ? "yes" : "no");
    }
    os << (r.pass ? "PASS" : "FAIL") << '\n';
}

} // namespace lwdip::spectra
