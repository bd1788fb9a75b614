#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "sascor/filter_band.hpp"
#include "sascor/spectrum_io.hpp"

namespace sascor::stats {

// Second radiation constant hc/k_B in cm*K; converts a wavenumber to a
// thermal exponent.
inline constexpr double kSecondRadiationConstant = 1.4388;

// Mean thermal occupation 1/(exp(c2*nu/T) - 1); 0 at T = 0.
double bose_einstein(double nu_cm1, double temperature_K);

// Anti-Stokes/Stokes intensity ratio n/(n+1) = exp(-c2*nu/T).
double thermal_stokes_ratio(double nu_cm1, double temperature_K);

// Thermal anti-Stokes rate through a band: integral of
// I_S(d) * n(d,T)/(n(d,T)+1) * T_aS(d) over the band. The band must lie
// inside the spectrum support.
double anti_stokes_background(const RamanSpectrum& s, const FilterBand& band,
                              double temperature_K);

struct CountWindow {
    std::int64_t n_s;
    std::int64_t n_as;
};

struct CountRecord {
    std::vector<CountWindow> windows;
    double window_length_s = 0.0;
};

CountRecord load_count_record(const std::filesystem::path& path);
void save_count_record(const CountRecord& r, const std::filesystem::path& path);

struct G2Estimates {
    double g2_s_as;   // cross correlation mean(ns*nas)/(mean(ns)*mean(nas))
    double g2_ss;     // normally ordered auto mean(n(n-1))/mean(n)^2
    double g2_asas;
    double se_s_as;   // delta-method standard errors
    double se_ss;
    double se_asas;
    std::size_t n_windows;
};

// Same-window (tau = 0) estimators; throws NumericsError on a zero-mean channel.
G2Estimates g2_from_counts(const CountRecord& record);

enum class Classicality { classical, nonclassical, autos_unmeasurable };

struct CauchySchwarzResult {
    Classicality verdict;
    double violation_ratio;  // g2_s_as^2 / (g2_ss * g2_asas)
};

// Nonclassical iff the ratio exceeds 1; zero autocorrelation product is
// reported as autos_unmeasurable instead of a division error.
CauchySchwarzResult cauchy_schwarz_check(double g2_s_as, double g2_ss, double g2_asas);

const char* to_string(Classicality c);

// Per-window means of the uncorrelated background. stokes_rate scales
// linearly with laser power, thermal_as_rate linearly, sas_as_rate (the
// anti-Stokes photons fed by the pair process itself) quadratically.
struct BackgroundModel {
    double stokes_rate = 0.0;
    double thermal_as_rate = 0.0;
    double sas_as_rate = 0.0;
};

// Uncorrelated coincidence rate
//   U = stokes_rate*s * (thermal_as_rate*s + sas_as_rate*s^2)
// at laser scale s. With the sas term on, C/U is strictly decreasing in s.
double accidental_model(const BackgroundModel& background, double laser_scale);

}  // namespace sascor::stats
