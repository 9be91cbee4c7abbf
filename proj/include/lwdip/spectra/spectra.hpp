#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace lwdip::spectra {

/// Reference for the plotting axis (omega - omega0) / omega_M.
struct AxisScale {
    double omega0 = 0.0;
    double omega_M = 0.0;
};

struct Peak {
    double position = 0.0;           // rad/s, sub-bin refined
    double height = 0.0;
    double prominence = 0.0;
    double normalized_offset = 0.0;  // (position - omega0)/omega_M, 0 without an AxisScale
};

struct SpectrumResult {
    std::vector<double> freq_axis;        // rad/s, uniform, one-sided
    std::vector<double> magnitude;        // |DFT| of the detrended, Hamming-windowed, zero-padded series
    std::vector<double> normalized_axis;  // (omega - omega0)/omega_M; empty without an AxisScale
    std::vector<Peak> peaks;              // sorted by position
    double bin_width = 0.0;               // 2 pi / (dt_effective * n_samples), the unpadded resolution
    double axis_step = 0.0;               // spacing of freq_axis after zero padding
    std::size_t n_samples = 0;
    std::size_t fft_length = 0;
    double prominence_threshold = 0.0;    // fraction of max(magnitude) used by find_peaks
    std::optional<AxisScale> scale;
};

inline constexpr double kDefaultProminence = 1e-3;

/// w[n] = 0.54 - 0.46 cos(2 pi n / (N - 1)).
std::vector<double> hamming_window(std::size_t n);

/// Magnitude spectrum of a real series sampled every `dt_effective` seconds.
/// The mean is subtracted, a Hamming window applied, and the result zero-padded
/// to 4x the next power of two. Throws DomainError for fewer than 16 samples
/// or non-positive dt_effective.
SpectrumResult windowed_fft(std::span<const double> series, double dt_effective,
                            std::optional<AxisScale> scale = std::nullopt);

/// Fills `peaks` with local maxima whose topographic prominence is at least
/// threshold * max(magnitude). Positions and heights are refined by a parabola
/// through the three samples around each maximum.
SpectrumResult find_peaks(SpectrumResult spectrum, double prominence_threshold = kDefaultProminence);

/// Energy of the detrended, windowed series (time side of Parseval's identity).
double windowed_energy(std::span<const double> series);
/// Energy recovered from the one-sided magnitude spectrum (frequency side).
double spectrum_energy(const SpectrumResult& spectrum);

/// Peaks with prominence >= 10 * threshold * max(magnitude).
std::vector<Peak> major_peaks(const SpectrumResult& spectrum);

struct LineMatch {
    Peak peak;
    double nearest_line = 0.0;  // rad/s
    double offset_bins = 0.0;   // (peak - line) / bin_width
    bool major = false;
    bool within_tolerance = false;
};

struct MatchReport {
    std::vector<LineMatch> matches;
    double tolerance_bins = 0.0;
    bool pass = false;  // every major peak within tolerance of some line
};

MatchReport compare_to_floquet(const SpectrumResult& spectrum, std::span<const double> lines, double tolerance_bins);

/// Greedy clustering of positions taken modulo `period`: positions are visited
/// in the given order and join the first centre within `radius` (circular
/// distance), otherwise start a new centre.
struct ResidueClusters {
    std::vector<double> centers;        // residues in [0, period)
    std::vector<std::size_t> assignment;
    double max_distance = 0.0;          // largest member-to-centre circular distance
};

ResidueClusters cluster_residues(std::span<const double> positions, double period, double radius);

/// omega_rad_s,normalized_offset,magnitude
void write_spectrum_csv(std::ostream& os, const SpectrumResult& spectrum);
/// position_rad_s,normalized_offset,height,prominence
void write_peaks_csv(std::ostream& os, const SpectrumResult& spectrum);
void write_match_report(std::ostream& os, const MatchReport& report);

} // namespace lwdip::spectra
