#include "sascor/spectrum_io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"
#include "sascor/detail/num_format.hpp"
#include "sascor/errors.hpp"
#include "sascor/version.hpp"

namespace sascor {

namespace {

std::string location(const std::filesystem::path& path, std::size_t line) {
    return path.filename().string() + ":" + std::to_string(line);
}

bool parse_double(std::string_view field, double& out) {
    const char* first = field.data();
    const char* last = field.data() + field.size();
    while (first != last && (*first == ' ' || *first == '\t')) ++first;
    while (last != first && (*(last - 1) == ' ' || *(last - 1) == '\t')) --last;
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last && first != last;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

double RamanSpectrum::max_intensity() const {
    double m = 0.0;
    for (const auto& p : points) m = std::max(m, p.intensity);
    return m;
}

double RamanSpectrum::intensity_at(double shift) const {
    if (points.empty() || shift < min_shift() || shift > max_shift())
        throw ValidationError("shift " + detail::format_double(shift) +
                              " cm^-1 outside spectrum support of '" + medium_name + "'");
    auto it = std::lower_bound(points.begin(), points.end(), shift,
                               [](const SpectrumPoint& p, double x) { return p.shift_cm1 < x; });
    if (it != points.end() && it->shift_cm1 == shift) return it->intensity;
    const auto& hi = *it;
    const auto& lo = *(it - 1);
    const double t = (shift - lo.shift_cm1) / (hi.shift_cm1 - lo.shift_cm1);
    return lo.intensity + t * (hi.intensity - lo.intensity);
}

bool RamanSpectrum::covers(double lo, double hi) const {
    return !points.empty() && min_shift() <= lo && hi <= max_shift();
}

void validate_spectrum(const RamanSpectrum& s) {
    if (s.points.size() < 8)
        throw ValidationError("spectrum '" + s.medium_name + "' has " +
                              std::to_string(s.points.size()) + " points, need at least 8");
    for (std::size_t i = 0; i < s.points.size(); ++i) {
        const auto& p = s.points[i];
        if (!std::isfinite(p.shift_cm1) || !std::isfinite(p.intensity))
            throw ValidationError("spectrum '" + s.medium_name + "': non-finite value at point " +
                                  std::to_string(i + 1));
        if (p.intensity < 0.0)
            throw ValidationError("spectrum '" + s.medium_name + "': negative intensity at point " +
                                  std::to_string(i + 1));
        if (i > 0 && p.shift_cm1 <= s.points[i - 1].shift_cm1)
            throw ValidationError("spectrum '" + s.medium_name + "': non-increasing shift at point " +
                                  std::to_string(i + 1));
    }
    if (s.temperature_K < 0.0)
        throw ValidationError("spectrum '" + s.medium_name + "': negative temperature");
}

namespace {

void normalize_peak(RamanSpectrum& s, const std::string& origin) {
    const double m = s.max_intensity();
    if (m <= 0.0) throw ValidationError(origin + ": maximum intensity is zero, spectrum unusable");
    if (m == 1.0) return;
    for (auto& p : s.points) p.intensity /= m;
}

RamanSpectrum load_csv(const std::filesystem::path& path) {
    RamanSpectrum s;
    s.medium_name = path.stem().string();

    const std::string text = read_file(path);
    std::size_t line_no = 0;
    std::size_t pos = 0;
    std::size_t row_of_last_shift = 0;
    double last_shift = 0.0;
    bool have_last = false;
    bool header_allowed = true;

    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string::npos) eol = text.size();
        std::string_view line(text.data() + pos, eol - pos);
        pos = eol + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty()) {
            if (pos > text.size()) break;
            continue;
        }
        if (line.front() == '#') {
            // Metadata comments written by save_spectrum.
            auto grab = [&](std::string_view key) -> std::optional<std::string> {
                std::string prefix = "# " + std::string(key) + ":";
                if (line.substr(0, prefix.size()) == prefix) {
                    std::string v(line.substr(prefix.size()));
                    v.erase(0, v.find_first_not_of(" \t"));
                    return v;
                }
                return std::nullopt;
            };
            if (auto v = grab("medium")) s.medium_name = *v;
            if (auto v = grab("temperature_K")) {
                double t;
                if (parse_double(*v, t)) s.temperature_K = t;
            }
            if (auto v = grab("excitation_power_mW")) {
                double t;
                if (parse_double(*v, t)) s.excitation_power_mW = t;
            }
            continue;
        }

        const std::size_t comma = line.find(',');
        if (comma == std::string_view::npos)
            throw ParseError(location(path, line_no) + ": expected two comma-separated columns");
        double shift, intensity;
        const bool ok = parse_double(line.substr(0, comma), shift) &&
                        parse_double(line.substr(comma + 1), intensity);
        if (!ok) {
            if (header_allowed) {  // a single leading header row is tolerated
                header_allowed = false;
                continue;
            }
            throw ParseError(location(path, line_no) + ": non-numeric row '" + std::string(line) + "'");
        }
        header_allowed = false;
        if (intensity < 0.0)
            throw ValidationError(location(path, line_no) + ": negative intensity");
        if (have_last && shift <= last_shift)
            throw ValidationError(location(path, line_no) + ": non-increasing shift (" +
                                  detail::format_double(shift) + " after " +
                                  detail::format_double(last_shift) + " on line " +
                                  std::to_string(row_of_last_shift) + ")");
        last_shift = shift;
        row_of_last_shift = line_no;
        have_last = true;
        s.points.push_back({shift, intensity});
        if (pos > text.size()) break;
    }

    validate_spectrum(s);
    normalize_peak(s, path.filename().string());
    return s;
}

RamanSpectrum load_json(const std::filesystem::path& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path.filename().string() + ": " + e.what());
    }
    RamanSpectrum s;
    s.medium_name = j.value("medium", path.stem().string());
    s.temperature_K = j.value("temperature_K", 295.0);
    if (j.contains("excitation_power_mW")) s.excitation_power_mW = j["excitation_power_mW"].get<double>();
    if (!j.contains("points") || !j["points"].is_array())
        throw ParseError(path.filename().string() + ": missing 'points' array");
    std::size_t row = 0;
    for (const auto& e : j["points"]) {
        ++row;
        if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
            throw ParseError(path.filename().string() + ": points[" + std::to_string(row - 1) +
                             "] is not a numeric pair");
        s.points.push_back({e[0].get<double>(), e[1].get<double>()});
    }
    validate_spectrum(s);
    normalize_peak(s, path.filename().string());
    return s;
}

}  // namespace

RamanSpectrum load_spectrum(const std::filesystem::path& path, SpectrumFormat format) {
    return format == SpectrumFormat::csv ? load_csv(path) : load_json(path);
}

RamanSpectrum load_spectrum(const std::filesystem::path& path) {
    const std::string ext = path.extension().string();
    if (ext == ".json") return load_json(path);
    if (ext == ".csv") return load_csv(path);
    throw ParseError("cannot infer format of '" + path.string() + "' (expected .csv or .json)");
}

void save_spectrum(const RamanSpectrum& s, const std::filesystem::path& path,
                   SpectrumFormat format) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot open '" + path.string() + "' for writing");
    if (format == SpectrumFormat::csv) {
        out << "# sascor " << kVersion << " spectrum\n";
        out << "# medium: " << s.medium_name << "\n";
        out << "# temperature_K: " << detail::format_double(s.temperature_K) << "\n";
        if (s.excitation_power_mW)
            out << "# excitation_power_mW: " << detail::format_double(*s.excitation_power_mW) << "\n";
        out << "shift_cm1,intensity\n";
        for (const auto& p : s.points)
            out << detail::format_double(p.shift_cm1) << "," << detail::format_double(p.intensity)
                << "\n";
    } else {
        nlohmann::json j;
        j["medium"] = s.medium_name;
        j["temperature_K"] = s.temperature_K;
        if (s.excitation_power_mW) j["excitation_power_mW"] = *s.excitation_power_mW;
        auto pts = nlohmann::json::array();
        for (const auto& p : s.points) pts.push_back({p.shift_cm1, p.intensity});
        j["points"] = std::move(pts);
        out << j.dump(2) << "\n";
    }
}

std::vector<double> GridSpec::points() const {
    if (!(step > 0.0) || !(start < stop))
        throw ValidationError("grid requires start < stop and step > 0");
    std::vector<double> out;
    const double n_exact = (stop - start) / step;
    const auto n = static_cast<std::size_t>(std::floor(n_exact + 0.5 * 1e-9 * std::max(1.0, n_exact)));
    out.reserve(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        double x = start + step * static_cast<double>(i);
        if (x > stop) x = stop;
        out.push_back(x);
    }
    return out;
}

RamanSpectrum resample(const RamanSpectrum& s, const GridSpec& grid) {
    validate_spectrum(s);
    const auto xs = grid.points();
    if (xs.front() < s.min_shift() || xs.back() > s.max_shift())
        throw ValidationError("resample grid [" + detail::format_double(xs.front()) + ", " +
                              detail::format_double(xs.back()) + "] outside spectrum support [" +
                              detail::format_double(s.min_shift()) + ", " +
                              detail::format_double(s.max_shift()) + "]");
    RamanSpectrum out;
    out.medium_name = s.medium_name;
    out.temperature_K = s.temperature_K;
    out.excitation_power_mW = s.excitation_power_mW;
    out.points.reserve(xs.size());
    for (double x : xs) out.points.push_back({x, s.intensity_at(x)});
    normalize_peak(out, s.medium_name);
    return out;
}

namespace {

// Index of the local maximum the bin belongs to, found by walking uphill.
std::size_t uphill_peak(const std::vector<SpectrumPoint>& pts, std::size_t i) {
    while (i + 1 < pts.size() && pts[i + 1].intensity > pts[i].intensity) ++i;
    while (i > 0 && pts[i - 1].intensity > pts[i].intensity) --i;
    return i;
}

// FWHM by linear interpolation of the half-height crossings around peak p;
// 0 when either crossing is missing inside the support.
double peak_fwhm(const std::vector<SpectrumPoint>& pts, std::size_t p) {
    const double half = pts[p].intensity / 2.0;
    double left = 0.0, right = 0.0;
    bool have_left = false, have_right = false;
    for (std::size_t j = p; j > 0; --j) {
        if (pts[j - 1].intensity <= half) {
            const double t = (pts[j].intensity - half) / (pts[j].intensity - pts[j - 1].intensity);
            left = pts[j].shift_cm1 - t * (pts[j].shift_cm1 - pts[j - 1].shift_cm1);
            have_left = true;
            break;
        }
    }
    for (std::size_t j = p; j + 1 < pts.size(); ++j) {
        if (pts[j + 1].intensity <= half) {
            const double t = (pts[j].intensity - half) / (pts[j].intensity - pts[j + 1].intensity);
            right = pts[j].shift_cm1 + t * (pts[j + 1].shift_cm1 - pts[j].shift_cm1);
            have_right = true;
            break;
        }
    }
    return (have_left && have_right) ? right - left : 0.0;
}

double median_spacing(const std::vector<SpectrumPoint>& pts) {
    std::vector<double> d;
    d.reserve(pts.size() - 1);
    for (std::size_t i = 1; i < pts.size(); ++i) d.push_back(pts[i].shift_cm1 - pts[i - 1].shift_cm1);
    std::nth_element(d.begin(), d.begin() + d.size() / 2, d.end());
    return d[d.size() / 2];
}

}  // namespace

VibrationalModeSet discretize_modes(const RamanSpectrum& s, double threshold, double default_gamma) {
    validate_spectrum(s);
    if (!(threshold > 0.0 && threshold < 1.0))
        throw ValidationError("discretize threshold must lie in (0, 1)");
    const double peak = s.max_intensity();
    if (peak <= 0.0)
        throw ValidationError("empty mode set: spectrum '" + s.medium_name + "' is all zero");
    if (std::abs(peak - 1.0) > 1e-9)
        throw ValidationError("spectrum '" + s.medium_name + "' must be peak-normalized before discretization");
    if (default_gamma <= 0.0) default_gamma = 2.0 * median_spacing(s.points);

    VibrationalModeSet set;
    std::map<std::size_t, double> fwhm_cache;
    for (std::size_t i = 0; i < s.points.size(); ++i) {
        if (s.points[i].intensity < threshold) continue;
        const std::size_t p = uphill_peak(s.points, i);
        auto it = fwhm_cache.find(p);
        if (it == fwhm_cache.end()) it = fwhm_cache.emplace(p, peak_fwhm(s.points, p)).first;
        const double gamma = it->second > 0.0 ? it->second : default_gamma;
        set.modes.push_back({s.points[i].shift_cm1, s.points[i].intensity, gamma});
    }
    if (set.modes.empty())
        throw ValidationError("empty mode set: threshold " + detail::format_double(threshold) +
                              " exceeds every intensity in '" + s.medium_name + "'");
    double wmax = 0.0;
    for (const auto& m : set.modes) wmax = std::max(wmax, m.weight);
    for (auto& m : set.modes) m.weight /= wmax;
    return set;
}

}  // namespace sascor
