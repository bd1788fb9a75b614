// Command-line front-end: wires spectrum ingestion, the pairing predictor,
// the Lindblad scanner and the coincidence statistics into reproducible runs
// with machine-readable outputs.
//
// Exit codes: 0 success, 2 usage/config error, 3 numerical failure.
// Errors are emitted as a JSON envelope on stderr.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "sascor/detail/num_format.hpp"
#include "sascor/errors.hpp"
#include "sascor/master_equation.hpp"
#include "sascor/pairing_core.hpp"
#include "sascor/spectrum_io.hpp"
#include "sascor/statistics.hpp"
#include "sascor/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void emit_envelope(const char* level, int code, const std::string& kind,
                   const std::string& message, json context = json::object()) {
    json j;
    j[level] = {{"code", code}, {"kind", kind}, {"message", message}, {"context", context}};
    std::cerr << j.dump() << "\n";
}

sascor::GridSpec parse_grid(const std::string& text) {
    const auto p1 = text.find(':');
    const auto p2 = text.find(':', p1 == std::string::npos ? p1 : p1 + 1);
    if (p1 == std::string::npos || p2 == std::string::npos)
        throw sascor::ValidationError("grid must be START:STOP:STEP, got '" + text + "'");
    try {
        const double start = std::stod(text.substr(0, p1));
        const double stop = std::stod(text.substr(p1 + 1, p2 - p1 - 1));
        const double step = std::stod(text.substr(p2 + 1));
        sascor::GridSpec g{start, stop, step};
        g.points();  // validates
        return g;
    } catch (const std::invalid_argument&) {
        throw sascor::ValidationError("grid must be numeric START:STOP:STEP, got '" + text + "'");
    }
}

std::string sanitize_name(const std::string& name) {
    std::string out;
    for (char ch : name)
        out += (std::isalnum(static_cast<unsigned char>(ch)) || ch == '-' || ch == '_') ? ch : '_';
    return out.empty() ? std::string("medium") : out;
}

struct CommonOpts {
    std::string out_dir;
    std::string format = "csv";
    int workers = 0;  // 0: hardware concurrency
    long long seed = 0;

    int resolved_workers() const {
        if (workers > 0) return workers;
        const unsigned hc = std::thread::hardware_concurrency();
        return hc > 0 ? static_cast<int>(hc) : 1;
    }
};

void add_common(CLI::App* cmd, CommonOpts& c, bool need_out = true) {
    auto* out = cmd->add_option("--out", c.out_dir, "Output directory");
    if (need_out) out->required();
    cmd->add_option("--format", c.format, "Output format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    cmd->add_option("--workers", c.workers, "Worker pool size (0 = hardware)")
        ->capture_default_str();
    cmd->add_option("--seed", c.seed, "Seed fixing any stochastic output")->capture_default_str();
}

// ---------------------------------------------------------------- predict --

struct PredictOpts {
    CommonOpts common;
    std::vector<std::string> spectra;
    std::string grid;
    double band_width = 150.0;
    std::string shape = "tophat";
    double temperature = -1.0;  // < 0: from spectrum file
    double laser_scale = 1.0;
    double sas_background = 1.0;
    double threshold = 0.02;
    double default_gamma = 0.0;
    bool incoherent = false;
};

int run_predict(const PredictOpts& o) {
    const auto centers = parse_grid(o.grid).points();
    sascor::pairing::PredictConfig cfg;
    cfg.band_width = o.band_width;
    cfg.shape = sascor::filter_shape_from_string(o.shape);
    cfg.threshold = o.threshold;
    cfg.default_gamma = o.default_gamma;
    cfg.laser_scale = o.laser_scale;
    cfg.sas_background = o.sas_background;
    cfg.temperature_K = o.temperature;
    cfg.incoherent = o.incoherent;
    cfg.workers = o.common.resolved_workers();
    const sascor::pairing::GapParameters params;

    fs::create_directories(o.common.out_dir);

    // Canonical processing order: sorted by path so output is reproducible
    // regardless of the command line ordering.
    std::vector<std::string> inputs = o.spectra;
    std::sort(inputs.begin(), inputs.end());

    struct MediumResult {
        std::string medium;
        sascor::pairing::CorrelationCurve curve;
    };
    std::vector<MediumResult> results;
    for (const auto& path : inputs) {
        try {
            auto spectrum = sascor::load_spectrum(path);
            auto curve = sascor::pairing::predict_g2_curve(spectrum, centers, params, cfg);
            curve.meta["command"] = "predict";
            curve.meta["grid"] = o.grid;
            curve.meta["seed"] = std::to_string(o.common.seed);
            curve.meta["spectrum_file"] = fs::path(path).filename().string();
            results.push_back({spectrum.medium_name, std::move(curve)});
        } catch (const sascor::Error& e) {
            emit_envelope("warning", 2, "ingestion", e.what(), {{"spectrum", path}});
        }
    }
    if (results.empty())
        throw sascor::ValidationError("no spectrum could be processed");

    std::sort(results.begin(), results.end(),
              [](const MediumResult& a, const MediumResult& b) { return a.medium < b.medium; });

    const std::string ext = "." + o.common.format;
    for (const auto& r : results) {
        const fs::path file = fs::path(o.common.out_dir) / (sanitize_name(r.medium) + "_curve" + ext);
        if (o.common.format == "csv") sascor::pairing::write_curve_csv(r.curve, file);
        else sascor::pairing::write_curve_json(r.curve, file);
    }

    if (results.size() > 1) {
        // Combined ranking at every requested band center, highest raw g2 first.
        double global_max = 0.0;
        for (const auto& r : results)
            for (const auto& pt : r.curve.points)
                if (pt.background_defined) global_max = std::max(global_max, pt.g2_raw);

        struct Row {
            double center;
            int rank;
            std::string medium;
            double g2_raw;
        };
        std::vector<Row> rows;
        for (std::size_t ci = 0; ci < centers.size(); ++ci) {
            std::vector<Row> at_center;
            for (const auto& r : results) {
                const auto& pt = r.curve.points[ci];
                if (pt.background_defined)
                    at_center.push_back({centers[ci], 0, r.medium, pt.g2_raw});
            }
            std::sort(at_center.begin(), at_center.end(), [](const Row& a, const Row& b) {
                if (a.g2_raw != b.g2_raw) return a.g2_raw > b.g2_raw;
                return a.medium < b.medium;
            });
            for (std::size_t k = 0; k < at_center.size(); ++k) at_center[k].rank = static_cast<int>(k + 1);
            rows.insert(rows.end(), at_center.begin(), at_center.end());
        }

        const fs::path file = fs::path(o.common.out_dir) / ("ranking" + ext);
        const std::vector<std::pair<std::string, std::string>> run_config{
            {"grid", o.grid},
            {"band_width", sascor::detail::format_double(o.band_width)},
            {"shape", o.shape},
            {"temperature_K", sascor::detail::format_double(o.temperature)},
            {"laser_scale", sascor::detail::format_double(o.laser_scale)},
            {"sas_background", sascor::detail::format_double(o.sas_background)},
            {"threshold", sascor::detail::format_double(o.threshold)},
            {"default_gamma", sascor::detail::format_double(o.default_gamma)},
            {"summation", o.incoherent ? "incoherent" : "coherent"},
            {"seed", std::to_string(o.common.seed)},
        };
        if (o.common.format == "csv") {
            std::ofstream out(file, std::ios::binary);
            out << "# sascor " << sascor::kVersion << " ranking\n";
            for (const auto& [k, v] : run_config) out << "# " << k << ": " << v << "\n";
            out << "band_center_cm1,rank,medium,g2_raw,g2_global_norm\n";
            for (const auto& row : rows)
                out << sascor::detail::format_double(row.center) << "," << row.rank << ","
                    << row.medium << "," << sascor::detail::format_double(row.g2_raw) << ","
                    << sascor::detail::format_double(global_max > 0 ? row.g2_raw / global_max : 0.0)
                    << "\n";
        } else {
            json j;
            j["tool"] = "sascor";
            j["version"] = sascor::kVersion;
            j["kind"] = "ranking";
            json jc;
            for (const auto& [k, v] : run_config) jc[k] = v;
            j["config"] = std::move(jc);
            auto arr = json::array();
            for (const auto& row : rows)
                arr.push_back({{"band_center_cm1", row.center},
                               {"rank", row.rank},
                               {"medium", row.medium},
                               {"g2_raw", row.g2_raw},
                               {"g2_global_norm", global_max > 0 ? row.g2_raw / global_max : 0.0}});
            j["rows"] = std::move(arr);
            std::ofstream out(file, std::ios::binary);
            out << j.dump(2) << "\n";
        }
    }
    return 0;
}

// --------------------------------------------------------------- simulate --

struct SimulateOpts {
    CommonOpts common;
    std::string grid;
    double nu = 1640.0;
    double g_s = 0.08;
    double g_as = 0.08;
    std::vector<double> t1_values;
    int n_max = 3;
    double dt = 0.0;
    double pulse = 5.0;
    double temperature = 295.0;
    double n_thermal = -1.0;  // < 0: from temperature
};

int run_simulate(const SimulateOpts& o) {
    const auto shifts = parse_grid(o.grid).points();
    sascor::lindblad::ModelConfig tpl;
    tpl.nu_cm1 = o.nu;
    tpl.g_s = o.g_s;
    tpl.g_as = o.g_as;
    tpl.n_max = o.n_max;
    tpl.pulse_duration = o.pulse;
    tpl.n_thermal = o.n_thermal >= 0.0
                        ? o.n_thermal
                        : (o.temperature > 0.0 ? sascor::stats::bose_einstein(o.nu, o.temperature) : 0.0);
    tpl.validate();
    if (o.g_s > 0.1 * o.nu || o.g_as > 0.1 * o.nu)
        emit_envelope("warning", 0, "strong_coupling",
                      "couplings are not small against nu; the weak-coupling model may not apply");

    std::vector<double> t1s = o.t1_values.empty() ? std::vector<double>{0.25, 1.0} : o.t1_values;
    auto scans =
        sascor::lindblad::scan_resonance(tpl, shifts, t1s, o.common.resolved_workers(), o.dt);

    bool any_pairs = false;
    for (const auto& curve : scans)
        for (const auto& pt : curve.points) any_pairs |= pt.pair_generation;
    if (!any_pairs)
        emit_envelope("warning", 0, "no_pair_generation",
                      "no pair generation anywhere on the grid (couplings too small?)");

    for (auto& curve : scans) {
        curve.meta["command"] = "simulate";
        curve.meta["grid"] = o.grid;
        curve.meta["seed"] = std::to_string(o.common.seed);
        curve.meta["temperature_K"] = sascor::detail::format_double(o.temperature);
        curve.meta["dt"] = sascor::detail::format_double(o.dt);
    }

    fs::create_directories(o.common.out_dir);
    const fs::path file = fs::path(o.common.out_dir) / ("scan." + o.common.format);
    if (o.common.format == "csv") sascor::lindblad::write_scan_csv(scans, file);
    else sascor::lindblad::write_scan_json(scans, file);
    return 0;
}

// ----------------------------------------------------------------- counts --

struct CountsOpts {
    CommonOpts common;
    std::string counts_file;
};

int run_counts(const CountsOpts& o) {
    const auto record = sascor::stats::load_count_record(o.counts_file);
    const auto est = sascor::stats::g2_from_counts(record);
    const auto cs = sascor::stats::cauchy_schwarz_check(est.g2_s_as, est.g2_ss, est.g2_asas);

    json j;
    j["tool"] = "sascor";
    j["version"] = sascor::kVersion;
    j["kind"] = "count-estimates";
    j["config"] = {{"counts", fs::path(o.counts_file).filename().string()},
                   {"seed", o.common.seed}};
    j["estimates"] = {{"g2_s_as", est.g2_s_as}, {"se_s_as", est.se_s_as},
                      {"g2_ss", est.g2_ss},     {"se_ss", est.se_ss},
                      {"g2_asas", est.g2_asas}, {"se_asas", est.se_asas},
                      {"n_windows", est.n_windows}};
    if (std::isfinite(cs.violation_ratio))
        j["cauchy_schwarz"] = {{"ratio", cs.violation_ratio},
                               {"verdict", sascor::stats::to_string(cs.verdict)}};
    else
        j["cauchy_schwarz"] = {{"ratio", nullptr},
                               {"verdict", sascor::stats::to_string(cs.verdict)}};

    fs::create_directories(o.common.out_dir);
    std::ofstream out(fs::path(o.common.out_dir) / "estimates.json", std::ios::binary);
    out << j.dump(2) << "\n";
    return 0;
}

// --------------------------------------------------------------- cs-check --

struct CsCheckOpts {
    double g2_sas = 0.0, g2_ss = 0.0, g2_asas = 0.0;
};

int run_cs_check(const CsCheckOpts& o) {
    const auto cs = sascor::stats::cauchy_schwarz_check(o.g2_sas, o.g2_ss, o.g2_asas);
    json j;
    j["tool"] = "sascor";
    j["version"] = sascor::kVersion;
    j["kind"] = "cs-check";
    j["config"] = {{"g2_s_as", o.g2_sas}, {"g2_ss", o.g2_ss}, {"g2_asas", o.g2_asas}};
    if (std::isfinite(cs.violation_ratio)) j["ratio"] = cs.violation_ratio;
    else j["ratio"] = nullptr;
    j["verdict"] = sascor::stats::to_string(cs.verdict);
    std::cout << j.dump(2) << "\n";
    return 0;
}

// ---------------------------------------------------------------- compare --

struct CompareOpts {
    CommonOpts common;
    std::string predicted_file;
    std::string simulated_file;
    double tolerance = 0.05;
};

int run_compare(const CompareOpts& o) {
    const auto curve = sascor::pairing::read_curve_json(o.predicted_file);
    const auto scans = sascor::lindblad::read_scan_json(o.simulated_file);
    if (scans.empty()) throw sascor::ValidationError("simulate file contains no curves");

    json report;
    report["tool"] = "sascor";
    report["version"] = sascor::kVersion;
    report["kind"] = "compare-report";
    report["config"] = {{"predicted", fs::path(o.predicted_file).filename().string()},
                        {"simulated", fs::path(o.simulated_file).filename().string()},
                        {"tolerance", o.tolerance},
                        {"seed", o.common.seed}};
    bool overall_pass = true;
    auto curves_json = json::array();

    for (const auto& scan : scans) {
        const double nu = scan.nu_cm1;
        const double window = 5.0 * std::max({scan.g_s, scan.g_as, scan.t1 > 0 ? 1.0 / scan.t1 : 0.0});

        struct Pair {
            double shift, yp, ys;
            bool far;
        };
        std::vector<Pair> shared;
        for (const auto& sp : scan.points) {
            if (!sp.pair_generation) continue;
            for (const auto& cp : curve.points) {
                if (std::abs(cp.shift_cm1 - sp.shift_cm1) >
                    1e-6 * std::max(1.0, std::abs(sp.shift_cm1)))
                    continue;
                if (!cp.background_defined) break;
                shared.push_back({sp.shift_cm1, cp.g2_raw - 1.0, sp.g2 - 1.0,
                                  std::abs(sp.shift_cm1 - nu) > window});
                break;
            }
        }
        if (shared.empty())
            throw sascor::ValidationError("no shared support between the predicted and simulated grids");

        // Reference shift: the shared point farthest from resonance.
        const auto ref = std::max_element(shared.begin(), shared.end(),
                                          [nu](const Pair& a, const Pair& b) {
                                              return std::abs(a.shift - nu) < std::abs(b.shift - nu);
                                          });
        if (!(std::abs(ref->yp) > 0.0) || !(std::abs(ref->ys) > 0.0))
            throw sascor::ValidationError("reference point has vanishing correlation, cannot normalize");

        double max_far = 0.0;
        auto pts = json::array();
        for (const auto& p : shared) {
            const double yp = p.yp / ref->yp;
            const double ys = p.ys / ref->ys;
            const double rel = std::abs(yp - ys) / std::max(std::abs(ys), 1e-300);
            if (p.far) max_far = std::max(max_far, rel);
            pts.push_back({{"shift_cm1", p.shift},
                           {"predicted_norm", yp},
                           {"simulated_norm", ys},
                           {"rel_diff", rel},
                           {"far_from_resonance", p.far},
                           {"included_in_gate", p.far}});
        }
        const bool pass = max_far <= o.tolerance;
        overall_pass = overall_pass && pass;
        curves_json.push_back({{"t1", scan.t1},
                               {"nu", nu},
                               {"reference_shift", ref->shift},
                               {"resonance_window", window},
                               {"max_rel_diff_far", max_far},
                               {"pass", pass},
                               {"points", std::move(pts)}});
    }
    report["curves"] = std::move(curves_json);
    report["pass"] = overall_pass;

    fs::create_directories(o.common.out_dir);
    std::ofstream out(fs::path(o.common.out_dir) / "compare_report.json", std::ios::binary);
    out << report.dump(2) << "\n";
    std::cout << (overall_pass ? "compare: PASS" : "compare: FAIL") << " (report written)\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Stokes/anti-Stokes photon-pair correlation toolkit"};
    app.set_version_flag("--version", std::string("sascor ") + sascor::kVersion);
    app.require_subcommand(1);

    PredictOpts po;
    auto* predict = app.add_subcommand(
        "predict", "Predict the normalized g2(0) curve of one or more media from Raman spectra");
    predict->add_option("--spectrum", po.spectra, "Spectrum file(s), .csv or .json")
        ->required()
        ->expected(-1);
    predict->add_option("--grid", po.grid, "Band centers START:STOP:STEP in cm^-1")->required();
    predict->add_option("--band-width", po.band_width, "Filter FWHM in cm^-1")->capture_default_str();
    predict->add_option("--shape", po.shape, "Filter shape")
        ->check(CLI::IsMember({"tophat", "gaussian"}))
        ->capture_default_str();
    predict->add_option("--temp", po.temperature, "Temperature in K (negative = from spectrum file)")
        ->capture_default_str();
    predict->add_option("--laser-scale", po.laser_scale, "Laser power relative to the measurement")
        ->capture_default_str();
    predict->add_option("--sas-background", po.sas_background,
                        "Scale of the pair-fed anti-Stokes background term (0 disables)")
        ->capture_default_str();
    predict->add_option("--threshold", po.threshold, "Mode discretization threshold")
        ->capture_default_str();
    predict->add_option("--default-gamma", po.default_gamma,
                        "Fallback linewidth in cm^-1 (0 = 2x bin spacing)")
        ->capture_default_str();
    predict->add_flag("--incoherent", po.incoherent, "Sum mode intensities instead of amplitudes");
    add_common(predict, po.common);

    SimulateOpts so;
    auto* simulate =
        app.add_subcommand("simulate", "Non-perturbative single-mode Lindblad scan of g2 vs shift");
    simulate->add_option("--grid", so.grid, "Shift grid START:STOP:STEP in cm^-1")->required();
    simulate->add_option("--nu", so.nu, "Phonon frequency in cm^-1")->capture_default_str();
    simulate->add_option("--g-s", so.g_s, "Stokes coupling in cm^-1")->capture_default_str();
    simulate->add_option("--g-as", so.g_as, "Anti-Stokes coupling in cm^-1")->capture_default_str();
    simulate->add_option("--t1", so.t1_values, "Phonon lifetime(s) in 1/cm^-1")->expected(-1);
    simulate->add_option("--n-max", so.n_max, "Fock truncation per mode")->capture_default_str();
    simulate->add_option("--dt", so.dt, "Integrator step (0 = auto)")->capture_default_str();
    simulate->add_option("--pulse", so.pulse, "Evolution time in 1/cm^-1")->capture_default_str();
    simulate->add_option("--temp", so.temperature, "Temperature in K for the thermal phonon number")
        ->capture_default_str();
    simulate->add_option("--n-thermal", so.n_thermal, "Override thermal phonon number (<0 = from temp)")
        ->capture_default_str();
    add_common(simulate, so.common);

    CountsOpts co;
    auto* counts = app.add_subcommand("counts", "Estimate g2 values from a coincidence count record");
    counts->add_option("--counts", co.counts_file, "Count record JSON")->required();
    add_common(counts, co.common);

    CsCheckOpts cs;
    auto* cscheck = app.add_subcommand("cs-check", "Cauchy-Schwarz classicality check");
    cscheck->add_option("--g2-sas", cs.g2_sas, "Cross correlation")->required();
    cscheck->add_option("--g2-ss", cs.g2_ss, "Stokes autocorrelation")->required();
    cscheck->add_option("--g2-asas", cs.g2_asas, "Anti-Stokes autocorrelation")->required();

    CompareOpts cmp;
    auto* compare = app.add_subcommand(
        "compare", "Compare a predict output with a simulate output on a shared grid");
    compare->add_option("--predicted", cmp.predicted_file, "predict JSON curve")->required();
    compare->add_option("--simulated", cmp.simulated_file, "simulate JSON scan")->required();
    compare->add_option("--tolerance", cmp.tolerance, "Far-from-resonance gate")->capture_default_str();
    add_common(compare, cmp.common);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
        std::ostringstream msg;
        const int rc = app.exit(e, msg, msg);
        emit_envelope("error", 2, "usage", msg.str());
        (void)rc;
        return 2;
    }

    try {
        if (predict->parsed()) return run_predict(po);
        if (simulate->parsed()) return run_simulate(so);
        if (counts->parsed()) return run_counts(co);
        if (cscheck->parsed()) return run_cs_check(cs);
        if (compare->parsed()) return run_compare(cmp);
    } catch (const sascor::NumericsError& e) {
        emit_envelope("error", 3, "numerics", e.what());
        return 3;
    } catch (const sascor::ValidationError& e) {
        emit_envelope("error", 2, "config", e.what());
        return 2;
    } catch (const sascor::ParseError& e) {
        emit_envelope("error", 2, "parse", e.what());
        return 2;
    } catch (const std::exception& e) {
        emit_envelope("error", 3, "internal", e.what());
        return 3;
    }
    return 0;
}
