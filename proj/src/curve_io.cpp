#include <cmath>
#include <fstream>
#include <limits>

#include "json.hpp"
#include "sascor/detail/num_format.hpp"
#include "sascor/errors.hpp"
#include "sascor/pairing_core.hpp"
#include "sascor/version.hpp"

namespace sascor::pairing {

namespace {

Regime regime_from_string(const std::string& s) {
    if (s == "virtual") return Regime::virtual_pairing;
    if (s == "near_resonance") return Regime::near_resonance;
    if (s == "mixed") return Regime::mixed;
    throw ParseError("unknown regime '" + s + "'");
}

double number_or_nan(const nlohmann::json& j, const char* key) {
    if (!j.contains(key) || j[key].is_null()) return std::numeric_limits<double>::quiet_NaN();
    return j[key].get<double>();
}

}  // namespace

void write_curve_csv(const CorrelationCurve& c, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot open '" + path.string() + "' for writing");
    out << "# sascor " << kVersion << " correlation-curve\n";
    for (const auto& [k, v] : c.meta) out << "# " << k << ": " << v << "\n";
    out << "shift_cm1,g2_norm,overlap,regime\n";
    for (const auto& p : c.points)
        out << detail::format_double(p.shift_cm1) << "," << detail::format_double(p.g2_norm) << ","
            << detail::format_double(p.overlap_factor) << "," << to_string(p.regime) << "\n";
}

void write_curve_json(const CorrelationCurve& c, const std::filesystem::path& path) {
    nlohmann::json j;
    j["tool"] = "sascor";
    j["version"] = kVersion;
    j["kind"] = "correlation-curve";
    j["config"] = c.meta;
    auto pts = nlohmann::json::array();
    for (const auto& p : c.points) {
        nlohmann::json e;
        e["shift_cm1"] = p.shift_cm1;
        if (std::isfinite(p.g2_norm)) e["g2_norm"] = p.g2_norm;
        else e["g2_norm"] = nullptr;
        e["overlap"] = p.overlap_factor;
        e["regime"] = to_string(p.regime);
        if (std::isfinite(p.g2_raw)) e["g2_raw"] = p.g2_raw;
        else e["g2_raw"] = nullptr;
        e["correlated_rate"] = p.correlated_rate;
        e["uncorrelated_rate"] = p.uncorrelated_rate;
        e["background_defined"] = p.background_defined;
        pts.push_back(std::move(e));
    }
    j["points"] = std::move(pts);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot open '" + path.string() + "' for writing");
    out << j.dump(2) << "\n";
}

CorrelationCurve read_curve_json(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open '" + path.string() + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path.filename().string() + ": " + e.what());
    }
    CorrelationCurve c;
    if (j.contains("config"))
        for (auto it = j["config"].begin(); it != j["config"].end(); ++it)
            c.meta[it.key()] = it.value().is_string() ? it.value().get<std::string>() : it.value().dump();
    if (!j.contains("points") || !j["points"].is_array())
        throw ParseError(path.filename().string() + ": missing 'points' array");
    for (const auto& e : j["points"]) {
        CurvePoint p;
        p.shift_cm1 = e.at("shift_cm1").get<double>();
        p.g2_norm = number_or_nan(e, "g2_norm");
        p.overlap_factor = e.value("overlap", 0.0);
        p.regime = regime_from_string(e.value("regime", "virtual"));
        p.g2_raw = number_or_nan(e, "g2_raw");
        p.correlated_rate = e.value("correlated_rate", 0.0);
        p.uncorrelated_rate = e.value("uncorrelated_rate", 0.0);
        p.background_defined = e.value("background_defined", std::isfinite(p.g2_raw));
        c.points.push_back(p);
    }
    return c;
}

}  // namespace sascor::pairing
