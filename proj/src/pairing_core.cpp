#include "sascor/pairing_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <thread>

#include "sascor/detail/num_format.hpp"
#include "sascor/detail/quadrature.hpp"
#include "sascor/errors.hpp"
#include "sascor/statistics.hpp"

namespace sascor {

namespace {
constexpr double kLn2x4 = 4.0 * std::numbers::ln2;
}

void FilterBand::validate() const {
    if (!(width_cm1 > 0.0)) throw ValidationError("filter band width must be > 0");
    if (!(center_cm1 > width_cm1 / 2.0))
        throw ValidationError("filter band at " + detail::format_double(center_cm1) +
                              " cm^-1 with width " + detail::format_double(width_cm1) +
                              " would include the laser line (center must exceed width/2)");
}

double FilterBand::transmission(double shift_cm1) const {
    const double x = shift_cm1 - center_cm1;
    if (shape == FilterShape::tophat) return std::abs(x) <= width_cm1 / 2.0 ? 1.0 : 0.0;
    return std::exp(-kLn2x4 * x * x / (width_cm1 * width_cm1));
}

double FilterBand::half_support() const {
    return shape == FilterShape::tophat ? width_cm1 / 2.0 : 1.5 * width_cm1;
}

double band_overlap(const FilterBand& stokes, const FilterBand& anti_stokes) {
    stokes.validate();
    anti_stokes.validate();
    const FilterBand& a = stokes;
    const FilterBand& b = anti_stokes;

    if (a.shape == FilterShape::tophat && b.shape == FilterShape::tophat) {
        const double lo = std::max(a.center_cm1 - a.width_cm1 / 2, b.center_cm1 - b.width_cm1 / 2);
        const double hi = std::min(a.center_cm1 + a.width_cm1 / 2, b.center_cm1 + b.width_cm1 / 2);
        return std::max(0.0, hi - lo);
    }
    if (a.shape == FilterShape::gaussian && b.shape == FilterShape::gaussian) {
        const double pa = kLn2x4 / (a.width_cm1 * a.width_cm1);
        const double pb = kLn2x4 / (b.width_cm1 * b.width_cm1);
        const double dc = a.center_cm1 - b.center_cm1;
        return std::sqrt(std::numbers::pi / (pa + pb)) * std::exp(-pa * pb * dc * dc / (pa + pb));
    }
    // Mixed top-hat x Gaussian: integrate the Gaussian over the top-hat window.
    const FilterBand& th = a.shape == FilterShape::tophat ? a : b;
    const FilterBand& g = a.shape == FilterShape::tophat ? b : a;
    const double p = kLn2x4 / (g.width_cm1 * g.width_cm1);
    const double r = std::sqrt(p);
    const double lo = th.center_cm1 - th.width_cm1 / 2 - g.center_cm1;
    const double hi = th.center_cm1 + th.width_cm1 / 2 - g.center_cm1;
    return 0.5 * std::sqrt(std::numbers::pi / p) * (std::erf(r * hi) - std::erf(r * lo));
}

const char* to_string(FilterShape s) {
    return s == FilterShape::tophat ? "tophat" : "gaussian";
}

FilterShape filter_shape_from_string(std::string_view name) {
    if (name == "tophat") return FilterShape::tophat;
    if (name == "gaussian") return FilterShape::gaussian;
    throw ValidationError("unknown filter shape '" + std::string(name) + "'");
}

}  // namespace sascor

namespace sascor::pairing {

std::complex<double> gap_delta(double shift_cm1, const VibrationalMode& mode,
                               const GapParameters& params) {
    if (!(shift_cm1 > 0.0)) throw ValidationError("gap_delta requires shift > 0");
    if (!(mode.gamma_cm1 > 0.0)) throw ValidationError("gap_delta requires gamma_q > 0");
    if (!(params.laser_intensity > 0.0)) throw ValidationError("laser_intensity must be > 0");
    // (shift - nu)(shift + nu) keeps the sign of the real part exact near the
    // resonance, where shift^2 - nu^2 would cancel catastrophically.
    const std::complex<double> denom((shift_cm1 - mode.nu_cm1) * (shift_cm1 + mode.nu_cm1),
                                     mode.nu_cm1 * mode.gamma_cm1);
    return (mode.weight * mode.nu_cm1 / denom) * params.laser_intensity;
}

std::complex<double> pair_amplitude(double shift_cm1, const VibrationalModeSet& modes,
                                    const GapParameters& params) {
    if (modes.modes.empty()) throw ValidationError("pair_amplitude requires a non-empty mode set");
    std::complex<double> sum = 0.0;
    for (const auto& m : modes.modes) sum += gap_delta(shift_cm1, m, params);
    return sum;
}

const char* to_string(Regime r) {
    switch (r) {
        case Regime::virtual_pairing: return "virtual";
        case Regime::near_resonance: return "near_resonance";
        case Regime::mixed: return "mixed";
    }
    return "?";
}

double correlated_rate(const VibrationalModeSet& modes, const GapParameters& params,
                       const FilterBand& stokes, const FilterBand& anti_stokes, bool incoherent) {
    stokes.validate();
    anti_stokes.validate();
    const double lo = std::max(stokes.center_cm1 - stokes.half_support(),
                               anti_stokes.center_cm1 - anti_stokes.half_support());
    const double hi = std::min(stokes.center_cm1 + stokes.half_support(),
                               anti_stokes.center_cm1 + anti_stokes.half_support());
    if (hi <= lo) return 0.0;

    auto intensity = [&](double d) {
        if (!incoherent) return std::norm(pair_amplitude(d, modes, params));
        double acc = 0.0;
        for (const auto& m : modes.modes) acc += std::norm(gap_delta(d, m, params));
        return acc;
    };
    const bool both_tophat =
        stokes.shape == FilterShape::tophat && anti_stokes.shape == FilterShape::tophat;
    if (both_tophat) return detail::simpson(intensity, lo, hi);
    return detail::simpson(
        [&](double d) { return intensity(d) * stokes.transmission(d) * anti_stokes.transmission(d); },
        lo, hi);
}

double stokes_rate(const RamanSpectrum& s, const FilterBand& band) {
    band.validate();
    const double lo = band.center_cm1 - band.half_support();
    const double hi = band.center_cm1 + band.half_support();
    if (!s.covers(lo, hi))
        throw ValidationError("band [" + detail::format_double(lo) + ", " +
                              detail::format_double(hi) + "] cm^-1 outside support of spectrum '" +
                              s.medium_name + "'");
    if (band.shape == FilterShape::tophat)
        return detail::simpson([&](double d) { return s.intensity_at(d); }, lo, hi);
    return detail::simpson([&](double d) { return s.intensity_at(d) * band.transmission(d); }, lo, hi);
}

namespace {

Regime classify_regime(const VibrationalModeSet& modes, double center, double half_width) {
    bool mixed = false;
    for (const auto& m : modes.modes) {
        const double dist = std::abs(m.nu_cm1 - center);
        if (dist <= half_width + m.gamma_cm1) return Regime::near_resonance;
        if (dist <= half_width + 3.0 * m.gamma_cm1) mixed = true;
    }
    return mixed ? Regime::mixed : Regime::virtual_pairing;
}

void validate_config(const PredictConfig& cfg) {
    if (!(cfg.band_width > 0.0)) throw ValidationError("band_width must be > 0");
    if (!(cfg.laser_scale > 0.0)) throw ValidationError("laser_scale must be > 0");
    if (cfg.sas_background < 0.0) throw ValidationError("sas_background must be >= 0");
}

}  // namespace

CorrelationCurve predict_g2_curve(const RamanSpectrum& s, const std::vector<double>& centers,
                                  const GapParameters& params, const PredictConfig& cfg) {
    validate_config(cfg);
    validate_spectrum(s);
    if (centers.empty()) throw ValidationError("predict_g2_curve requires a non-empty grid");

    RamanSpectrum spec = s;
    const double peak = spec.max_intensity();
    if (peak <= 0.0) throw ValidationError("spectrum '" + s.medium_name + "' is all zero");
    for (auto& p : spec.points) p.intensity /= peak;

    const double temperature = cfg.temperature_K >= 0.0 ? cfg.temperature_K : spec.temperature_K;
    const VibrationalModeSet modes = discretize_modes(spec, cfg.threshold, cfg.default_gamma);

    CorrelationCurve curve;
    curve.points.resize(centers.size());

    // Every center is evaluated independently with a fixed summation order,
    // so the result does not depend on the worker count.
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto eval_range = [&](std::size_t begin, std::size_t stride) {
        for (std::size_t i = begin; i < centers.size(); i += stride) {
            try {
                const double c = centers[i];
                FilterBand band_s{c, cfg.band_width, cfg.shape};
                FilterBand band_as{c, cfg.band_width, cfg.shape};
                const double c_unit = correlated_rate(modes, params, band_s, band_as, cfg.incoherent);
                const double n_s = stokes_rate(spec, band_s);
                const double n_as_th = stats::anti_stokes_background(spec, band_as, temperature);
                const stats::BackgroundModel bm{n_s, n_as_th, cfg.sas_background * c_unit};
                const double u = stats::accidental_model(bm, cfg.laser_scale);
                const double c_phys = c_unit * cfg.laser_scale * cfg.laser_scale;

                CurvePoint& pt = curve.points[i];
                pt.shift_cm1 = c;
                pt.overlap_factor = band_overlap(band_s, band_as);
                pt.regime = classify_regime(modes, c, cfg.band_width / 2.0);
                pt.correlated_rate = c_phys;
                pt.uncorrelated_rate = u;
                if (u > 0.0) {
                    pt.g2_raw = 1.0 + c_phys / u;
                    pt.background_defined = true;
                } else {
                    pt.g2_raw = std::numeric_limits<double>::quiet_NaN();
                    pt.background_defined = false;
                }
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };

    const std::size_t workers = std::max(1, cfg.workers);
    if (workers == 1 || centers.size() < 2) {
        eval_range(0, 1);
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(eval_range, t, workers);
        for (auto& th : pool) th.join();
    }
    if (first_error) std::rethrow_exception(first_error);

    double max_raw = 0.0;
    for (const auto& pt : curve.points)
        if (pt.background_defined) max_raw = std::max(max_raw, pt.g2_raw);
    for (auto& pt : curve.points)
        pt.g2_norm = pt.background_defined && max_raw > 0.0
                         ? pt.g2_raw / max_raw
                         : std::numeric_limits<double>::quiet_NaN();

    curve.meta["medium"] = spec.medium_name;
    curve.meta["band_width"] = detail::format_double(cfg.band_width);
    curve.meta["shape"] = to_string(cfg.shape);
    curve.meta["threshold"] = detail::format_double(cfg.threshold);
    curve.meta["default_gamma"] = detail::format_double(cfg.default_gamma);
    curve.meta["laser_scale"] = detail::format_double(cfg.laser_scale);
    curve.meta["sas_background"] = detail::format_double(cfg.sas_background);
    curve.meta["laser_intensity"] = detail::format_double(params.laser_intensity);
    curve.meta["temperature_K"] = detail::format_double(temperature);
    curve.meta["summation"] = cfg.incoherent ? "incoherent" : "coherent";
    return curve;
}

}  // namespace sascor::pairing
