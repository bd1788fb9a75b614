#include "sascor/statistics.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"
#include "sascor/detail/quadrature.hpp"
#include "sascor/errors.hpp"

namespace sascor::stats {

double bose_einstein(double nu_cm1, double temperature_K) {
    if (!(nu_cm1 > 0.0)) throw ValidationError("bose_einstein requires nu > 0");
    if (temperature_K < 0.0) throw ValidationError("bose_einstein requires T >= 0");
    if (temperature_K == 0.0) return 0.0;
    return 1.0 / std::expm1(kSecondRadiationConstant * nu_cm1 / temperature_K);
}

double thermal_stokes_ratio(double nu_cm1, double temperature_K) {
    if (!(nu_cm1 > 0.0)) throw ValidationError("thermal_stokes_ratio requires nu > 0");
    if (temperature_K < 0.0) throw ValidationError("thermal_stokes_ratio requires T >= 0");
    if (temperature_K == 0.0) return 0.0;
    // n/(n+1) collapses to the Boltzmann factor.
    return std::exp(-kSecondRadiationConstant * nu_cm1 / temperature_K);
}

double anti_stokes_background(const RamanSpectrum& s, const FilterBand& band,
                              double temperature_K) {
    band.validate();
    const double lo = band.center_cm1 - band.half_support();
    const double hi = band.center_cm1 + band.half_support();
    if (!s.covers(lo, hi))
        throw ValidationError("band [" + std::to_string(lo) + ", " + std::to_string(hi) +
                              "] cm^-1 outside support of spectrum '" + s.medium_name + "'");
    if (temperature_K == 0.0) return 0.0;
    // Inside a top-hat window the transmission is identically 1; skipping the
    // factor avoids evaluating it at the window edges, where rounding of
    // center -/+ width/2 can land one ulp outside the band.
    if (band.shape == FilterShape::tophat)
        return detail::simpson(
            [&](double d) { return s.intensity_at(d) * thermal_stokes_ratio(d, temperature_K); },
            lo, hi);
    return detail::simpson(
        [&](double d) {
            return s.intensity_at(d) * thermal_stokes_ratio(d, temperature_K) * band.transmission(d);
        },
        lo, hi);
}

CountRecord load_count_record(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open '" + path.string() + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path.filename().string() + ": " + e.what());
    }
    CountRecord r;
    r.window_length_s = j.value("window_length_s", 0.0);
    if (!j.contains("windows") || !j["windows"].is_array() || j["windows"].empty())
        throw ParseError(path.filename().string() + ": missing non-empty 'windows' array");
    std::size_t idx = 0;
    for (const auto& w : j["windows"]) {
        if (!w.is_array() || w.size() != 2 || !w[0].is_number_integer() || !w[1].is_number_integer())
            throw ParseError(path.filename().string() + ": windows[" + std::to_string(idx) +
                             "] is not an integer pair");
        const auto ns = w[0].get<std::int64_t>();
        const auto nas = w[1].get<std::int64_t>();
        if (ns < 0 || nas < 0)
            throw ValidationError(path.filename().string() + ": negative count in windows[" +
                                  std::to_string(idx) + "]");
        r.windows.push_back({ns, nas});
        ++idx;
    }
    return r;
}

void save_count_record(const CountRecord& r, const std::filesystem::path& path) {
    nlohmann::json j;
    j["window_length_s"] = r.window_length_s;
    auto arr = nlohmann::json::array();
    for (const auto& w : r.windows) arr.push_back({w.n_s, w.n_as});
    j["windows"] = std::move(arr);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot open '" + path.string() + "' for writing");
    out << j.dump() << "\n";
}

namespace {

struct AutoEstimate {
    double g2;
    double se;
};

// g = mean(n(n-1))/mean(n)^2 with a delta-method standard error.
AutoEstimate auto_correlation(const std::vector<CountWindow>& ws, bool stokes_channel) {
    const auto N = static_cast<long double>(ws.size());
    long double sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
    for (const auto& w : ws) {
        const long double n = static_cast<long double>(stokes_channel ? w.n_s : w.n_as);
        const long double a = n * (n - 1);
        sa += a;
        sb += n;
        saa += a * a;
        sbb += n * n;
        sab += a * n;
    }
    if (sb <= 0)
        throw NumericsError(std::string("zero-mean ") + (stokes_channel ? "Stokes" : "anti-Stokes") +
                            " channel, autocorrelation undefined");
    const long double A = sa / N, B = sb / N;
    const long double g = A / (B * B);
    const long double var_a = saa / N - A * A;
    const long double var_b = sbb / N - B * B;
    const long double cov_ab = sab / N - A * B;
    const long double da = 1.0L / (B * B);
    const long double db = -2.0L * A / (B * B * B);
    long double var_g = (da * da * var_a + db * db * var_b + 2 * da * db * cov_ab) / N;
    if (var_g < 0) var_g = 0;
    return {static_cast<double>(g), static_cast<double>(std::sqrt(var_g))};
}

}  // namespace

G2Estimates g2_from_counts(const CountRecord& record) {
    const auto& ws = record.windows;
    if (ws.empty()) throw ValidationError("count record has no windows");
    const auto N = static_cast<long double>(ws.size());

    long double sx = 0, sy = 0, sa = 0;           // x = n_s, y = n_as, a = x*y
    long double sxx = 0, syy = 0, saa = 0, sax = 0, say = 0;
    for (const auto& w : ws) {
        const long double x = static_cast<long double>(w.n_s);
        const long double y = static_cast<long double>(w.n_as);
        const long double a = x * y;
        sx += x;
        sy += y;
        sa += a;
        sxx += x * x;
        syy += y * y;
        saa += a * a;
        sax += a * x;
        say += a * y;
    }
    if (sx <= 0 || sy <= 0) throw NumericsError("zero-mean channel, cross-correlation undefined");

    const long double A = sa / N, B = sx / N, C = sy / N;
    const long double g = A / (B * C);
    const long double var_a = saa / N - A * A;
    const long double var_b = sxx / N - B * B;
    const long double var_c = syy / N - C * C;
    const long double cov_ab = sax / N - A * B;
    const long double cov_ac = say / N - A * C;
    const long double cov_bc = sa / N - B * C;
    const long double da = 1.0L / (B * C);
    const long double db = -A / (B * B * C);
    const long double dc = -A / (B * C * C);
    long double var_g = (da * da * var_a + db * db * var_b + dc * dc * var_c +
                         2 * (da * db * cov_ab + da * dc * cov_ac + db * dc * cov_bc)) /
                        N;
    if (var_g < 0) var_g = 0;

    const auto ss = auto_correlation(ws, true);
    const auto asas = auto_correlation(ws, false);
    return {static_cast<double>(g), ss.g2,  asas.g2,
            static_cast<double>(std::sqrt(var_g)), ss.se, asas.se,
            ws.size()};
}

CauchySchwarzResult cauchy_schwarz_check(double g2_s_as, double g2_ss, double g2_asas) {
    for (double v : {g2_s_as, g2_ss, g2_asas})
        if (!std::isfinite(v) || v < 0.0)
            throw ValidationError("cauchy_schwarz_check requires finite non-negative inputs");
    const double denom = g2_ss * g2_asas;
    if (denom == 0.0)
        return {Classicality::autos_unmeasurable, std::numeric_limits<double>::quiet_NaN()};
    const double ratio = g2_s_as * g2_s_as / denom;
    return {ratio > 1.0 ? Classicality::nonclassical : Classicality::classical, ratio};
}

const char* to_string(Classicality c) {
    switch (c) {
        case Classicality::classical: return "classical";
        case Classicality::nonclassical: return "nonclassical";
        case Classicality::autos_unmeasurable: return "autos_unmeasurable";
    }
    return "?";
}

double accidental_model(const BackgroundModel& background, double laser_scale) {
    if (background.stokes_rate < 0 || background.thermal_as_rate < 0 || background.sas_as_rate < 0)
        throw ValidationError("accidental_model requires non-negative rates");
    if (!(laser_scale > 0.0)) throw ValidationError("accidental_model requires laser_scale > 0");
    const double s = laser_scale;
    return background.stokes_rate * s *
           (background.thermal_as_rate * s + background.sas_as_rate * s * s);
}

}  // namespace sascor::stats
