#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace sascor {

struct SpectrumPoint {
    double shift_cm1;
    double intensity;
};

// A measured Stokes Raman spectrum for one medium. Shifts are strictly
// increasing, intensities non-negative, at least 8 points. After load the
// intensities are rescaled so the highest bin equals 1; only intensity
// ratios ever enter the physics.
struct RamanSpectrum {
    std::string medium_name;
    std::vector<SpectrumPoint> points;
    double temperature_K = 295.0;
    std::optional<double> excitation_power_mW;

    double min_shift() const { return points.front().shift_cm1; }
    double max_shift() const { return points.back().shift_cm1; }
    double max_intensity() const;

    // Linear interpolation; throws ValidationError outside the support.
    double intensity_at(double shift_cm1) const;
    bool covers(double lo, double hi) const;
};

// Throws ValidationError if any structural invariant is violated.
void validate_spectrum(const RamanSpectrum& s);

struct VibrationalMode {
    double nu_cm1;     // mode frequency
    double weight;     // relative scattering amplitude squared, peak = 1
    double gamma_cm1;  // FWHM linewidth, > 0
};

struct VibrationalModeSet {
    std::vector<VibrationalMode> modes;
};

enum class SpectrumFormat { csv, json };

// Loads and validates a spectrum; intensities rescaled so max = 1.
// Parse and validation failures are reported with 1-based line numbers.
RamanSpectrum load_spectrum(const std::filesystem::path& path, SpectrumFormat format);
// Format inferred from the extension (.csv / .json).
RamanSpectrum load_spectrum(const std::filesystem::path& path);

void save_spectrum(const RamanSpectrum& s, const std::filesystem::path& path,
                   SpectrumFormat format);

// Uniform shift grid: start, start+step, ..., up to and including stop
// (within a half-step tolerance).
struct GridSpec {
    double start;
    double stop;
    double step;
    std::vector<double> points() const;
};

// Linear interpolation onto the grid; preserves non-negativity and
// renormalizes the maximum to 1. Grid must lie inside the spectrum support.
RamanSpectrum resample(const RamanSpectrum& s, const GridSpec& grid);

// Per-bin discretization: every bin with intensity >= threshold becomes a
// mode with weight = intensity and gamma = the FWHM of the local peak the
// bin belongs to, or default_gamma where no half-height crossings exist
// inside the support. default_gamma <= 0 selects 2x the median bin spacing.
// Throws ValidationError when no bin reaches the threshold.
VibrationalModeSet discretize_modes(const RamanSpectrum& s, double threshold = 0.02,
                                    double default_gamma = 0.0);

}  // namespace sascor
