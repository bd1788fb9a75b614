#pragma once

#include <complex>
#include <map>
#include <string>
#include <vector>

#include "sascor/filter_band.hpp"
#include "sascor/spectrum_io.hpp"

namespace sascor::pairing {

// All frequencies are wavenumbers (cm^-1) and hbar = 1 in these units, so
// energies and rates carry the same dimension.
struct GapParameters {
    double laser_intensity = 1.0;  // coherent pump scale alpha_L^2, > 0
};

// Pair-coupling amplitude of one vibrational mode at a symmetric shift:
//   weight * laser_intensity * nu / ((shift - nu)(shift + nu) + i*nu*gamma).
// The imaginary linewidth term regularizes the real-scattering pole; the
// real part is negative (attractive) exactly when shift < nu.
std::complex<double> gap_delta(double shift_cm1, const VibrationalMode& mode,
                               const GapParameters& params);

// Coherent sum of gap_delta over the mode set: the amplitude, up to a global
// constant that cancels in normalized output, for the photon pair emitted at
// symmetric shifts +-shift.
std::complex<double> pair_amplitude(double shift_cm1, const VibrationalModeSet& modes,
                                    const GapParameters& params);

enum class Regime { virtual_pairing, near_resonance, mixed };
const char* to_string(Regime r);

struct CurvePoint {
    double shift_cm1 = 0.0;
    double g2_norm = 0.0;          // g2_raw / max over the grid; NaN when undefined
    double overlap_factor = 0.0;   // band_overlap of the mirrored filter pair
    Regime regime = Regime::virtual_pairing;
    double g2_raw = 0.0;           // 1 + C/U
    double correlated_rate = 0.0;    // C, arbitrary units
    double uncorrelated_rate = 0.0;  // U, arbitrary units
    bool background_defined = true;  // false when U = 0 (spectrum zero in band)
};

struct CorrelationCurve {
    std::vector<CurvePoint> points;
    std::map<std::string, std::string> meta;  // resolved config echoed by writers
};

struct PredictConfig {
    double band_width = 150.0;         // FWHM of both filters, cm^-1
    FilterShape shape = FilterShape::tophat;
    double threshold = 0.02;           // discretization threshold
    double default_gamma = 0.0;        // <= 0: 2x median bin spacing
    double laser_scale = 1.0;          // power relative to the ingested spectrum
    double sas_background = 1.0;       // kappa: anti-Stokes photons fed back by the
                                       // pair process itself; 0 disables the term
    double temperature_K = -1.0;       // < 0: use the spectrum's own temperature
    bool incoherent = false;           // sum |Delta|^2 instead of |sum Delta|^2
    int workers = 1;                   // centers are independent; output is
                                       // identical for any worker count
};

// Correlated coincidence rate through a filter pair:
//   C = integral |pair_amplitude(d)|^2 T_S(d) T_aS(d) dd
// over the mirrored overlap window. Exposed separately so the band geometry
// can be exercised with asymmetric filters.
double correlated_rate(const VibrationalModeSet& modes, const GapParameters& params,
                       const FilterBand& stokes, const FilterBand& anti_stokes,
                       bool incoherent = false);

// Stokes singles rate: integral of the spectrum intensity over the band.
double stokes_rate(const RamanSpectrum& s, const FilterBand& band);

// Normalized g2(0) across the shift axis, Fig.-style: for each band center,
// C from the pair amplitude, U = <n_S><n_aS> from the spectrum and the
// thermal factor plus the optional pair-fed anti-Stokes term, g2_raw = 1+C/U,
// and the curve divided by its maximum. Points with U = 0 are flagged, not
// dropped. Throws ValidationError when a band leaves the spectrum support.
CorrelationCurve predict_g2_curve(const RamanSpectrum& s, const std::vector<double>& centers,
                                  const GapParameters& params, const PredictConfig& config);

// --- serialization (curve_io.cpp) ---

// CSV schema: '#'-prefixed metadata lines, then
// shift_cm1,g2_norm,overlap,regime with one row per point.
void write_curve_csv(const CorrelationCurve& c, const std::filesystem::path& path);
// JSON carries the full per-point diagnostics (g2_raw, C, U, defined flag).
void write_curve_json(const CorrelationCurve& c, const std::filesystem::path& path);
CorrelationCurve read_curve_json(const std::filesystem::path& path);

}  // namespace sascor::pairing
