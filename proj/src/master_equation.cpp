#include "sascor/master_equation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <mutex>
#include <thread>

#include "json.hpp"
#include "sascor/detail/num_format.hpp"
#include "sascor/errors.hpp"
#include "sascor/version.hpp"

namespace sascor::lindblad {

using Complex = std::complex<double>;

namespace {

constexpr Complex kI{0.0, 1.0};

struct Basis {
    int n_max;
    int per_mode;  // n_max + 1
    int dim;       // per_mode^3

    explicit Basis(int nm) : n_max(nm), per_mode(nm + 1), dim((nm + 1) * (nm + 1) * (nm + 1)) {}

    int index(int n_s, int n_as, int n_b) const {
        return (n_s * per_mode + n_as) * per_mode + n_b;
    }
    int n_s(int k) const { return k / (per_mode * per_mode); }
    int n_as(int k) const { return (k / per_mode) % per_mode; }
    int n_b(int k) const { return k % per_mode; }
};

}  // namespace

void ModelConfig::validate() const {
    if (n_max < 2) throw ValidationError("Fock truncation too small: n_max must be >= 2");
    if (!(nu_cm1 > 0.0)) throw ValidationError("phonon frequency nu must be > 0");
    if (g_s < 0.0 || g_as < 0.0) throw ValidationError("couplings must be >= 0");
    if (n_thermal < 0.0) throw ValidationError("n_thermal must be >= 0");
    if (!(pulse_duration > 0.0)) throw ValidationError("pulse_duration must be > 0");
}

DensityOperator DensityOperator::vacuum(int n_max) {
    return with_thermal_phonon(n_max, 0.0);
}

DensityOperator DensityOperator::with_thermal_phonon(int n_max, double n_thermal) {
    if (n_max < 2) throw ValidationError("Fock truncation too small: n_max must be >= 2");
    const Basis basis(n_max);
    DensityOperator rho;
    rho.n_max = n_max;
    rho.matrix = Eigen::MatrixXcd::Zero(basis.dim, basis.dim);
    if (n_thermal <= 0.0) {
        rho.matrix(0, 0) = 1.0;
        return rho;
    }
    // p(n) ~ n_th^n / (n_th+1)^(n+1), renormalized over the truncated space.
    std::vector<double> p(basis.per_mode);
    double norm = 0.0;
    const double ratio = n_thermal / (n_thermal + 1.0);
    double w = 1.0 / (n_thermal + 1.0);
    for (int n = 0; n < basis.per_mode; ++n) {
        p[n] = w;
        norm += w;
        w *= ratio;
    }
    for (int n = 0; n < basis.per_mode; ++n) rho.matrix(basis.index(0, 0, n), basis.index(0, 0, n)) = p[n] / norm;
    return rho;
}

double DensityOperator::trace_error() const { return std::abs(matrix.trace().real() - 1.0) +
                                                     std::abs(matrix.trace().imag()); }

double DensityOperator::hermiticity_error() const {
    return (matrix - matrix.adjoint()).cwiseAbs().maxCoeff();
}

double DensityOperator::min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(0.5 * (matrix + matrix.adjoint()),
                                                           Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

void DensityOperator::check(double t_stamp) const {
    const double herm = hermiticity_error();
    if (herm > 1e-12)
        throw NumericsError("density matrix not Hermitian (err " + detail::format_double(herm) +
                            ") at t = " + detail::format_double(t_stamp));
    const double tr = trace_error();
    if (tr > 1e-9)
        throw NumericsError("density matrix trace deviates by " + detail::format_double(tr) +
                            " at t = " + detail::format_double(t_stamp));
    const double lam = min_eigenvalue();
    if (lam < -1e-9)
        throw NumericsError("density matrix eigenvalue " + detail::format_double(lam) +
                            " below positivity floor at t = " + detail::format_double(t_stamp));
}

SparseOp build_hamiltonian(const ModelConfig& config) {
    config.validate();
    const Basis basis(config.n_max);
    const double d_s = config.detuning();
    const double d_as = -config.detuning();

    std::vector<Eigen::Triplet<Complex>> trip;
    trip.reserve(static_cast<std::size_t>(basis.dim) * 5);
    for (int k = 0; k < basis.dim; ++k) {
        const int s = basis.n_s(k), a = basis.n_as(k), b = basis.n_b(k);
        const double diag = d_s * s + d_as * a;
        if (diag != 0.0) trip.emplace_back(k, k, Complex(diag, 0.0));
        // g_s (aS' b' + aS b): Stokes photon and phonon created together.
        if (config.g_s > 0.0 && s + 1 <= basis.n_max && b + 1 <= basis.n_max) {
            const double amp = config.g_s * std::sqrt(double(s + 1)) * std::sqrt(double(b + 1));
            const int j = basis.index(s + 1, a, b + 1);
            trip.emplace_back(j, k, Complex(amp, 0.0));
            trip.emplace_back(k, j, Complex(amp, 0.0));
        }
        // g_as (aAS' b + aAS b'): anti-Stokes photon created, phonon consumed.
        if (config.g_as > 0.0 && a + 1 <= basis.n_max && b >= 1) {
            const double amp = config.g_as * std::sqrt(double(a + 1)) * std::sqrt(double(b));
            const int j = basis.index(s, a + 1, b - 1);
            trip.emplace_back(j, k, Complex(amp, 0.0));
            trip.emplace_back(k, j, Complex(amp, 0.0));
        }
    }
    SparseOp h(basis.dim, basis.dim);
    h.setFromTriplets(trip.begin(), trip.end());
    return h;
}

double hamiltonian_norm(const SparseOp& h) {
    Eigen::VectorXd row_sum = Eigen::VectorXd::Zero(h.rows());
    for (int col = 0; col < h.outerSize(); ++col)
        for (SparseOp::InnerIterator it(h, col); it; ++it) row_sum[it.row()] += std::abs(it.value());
    return row_sum.size() > 0 ? row_sum.maxCoeff() : 0.0;
}

namespace {

// Allocation-free application of the Lindblad generator: two sparse
// Hamiltonian products plus one fused elementwise pass for the phonon
// dissipator (the lowering operator only shifts the phonon index, which is
// the fastest-running one).
struct Generator {
    Basis basis;
    SparseOp h;
    Eigen::VectorXd sqrt_b;   // sqrt(n_b) per basis state
    Eigen::VectorXd damping;  // 0.5*(gamma_down*n_b + gamma_up*bb')
    double gamma_down = 0.0;  // gamma1 (n_th + 1)
    double gamma_up = 0.0;    // gamma1 n_th

    mutable Eigen::MatrixXcd h_rho;
    mutable Eigen::MatrixXcd rho_h;

    explicit Generator(const ModelConfig& config)
        : basis(config.n_max), h(build_hamiltonian(config)) {
        const double g1 = config.gamma1();
        gamma_down = g1 * (config.n_thermal + 1.0);
        gamma_up = g1 * config.n_thermal;
        sqrt_b.resize(basis.dim);
        damping.resize(basis.dim);
        for (int k = 0; k < basis.dim; ++k) {
            const int nb = basis.n_b(k);
            sqrt_b[k] = std::sqrt(double(nb));
            // bb' evaluated on the truncated space: the top Fock level cannot
            // be raised, so its diagonal entry vanishes. Keeping the product
            // of the truncated operators makes the dissipator exactly
            // trace-free.
            const double bbdag = nb < basis.n_max ? nb + 1.0 : 0.0;
            damping[k] = 0.5 * (gamma_down * nb + gamma_up * bbdag);
        }
        h_rho.resize(basis.dim, basis.dim);
        rho_h.resize(basis.dim, basis.dim);
    }

    void apply(const Eigen::MatrixXcd& rho, Eigen::MatrixXcd& out) const {
        const int dim = basis.dim;
        const int top = basis.n_max;
        h_rho.noalias() = h * rho;
        rho_h.noalias() = rho * h;
        for (int col = 0; col < dim; ++col) {
            const int b_col = basis.n_b(col);
            Complex* o = out.data() + static_cast<std::ptrdiff_t>(col) * dim;
            const Complex* r = rho.data() + static_cast<std::ptrdiff_t>(col) * dim;
            const Complex* hr = h_rho.data() + static_cast<std::ptrdiff_t>(col) * dim;
            const Complex* rh = rho_h.data() + static_cast<std::ptrdiff_t>(col) * dim;
            for (int row = 0; row < dim; ++row)
                o[row] = -kI * (hr[row] - rh[row]) - (damping[row] + damping[col]) * r[row];
            // b rho b' pulls from the (b+1, b+1) sub-block, b' rho b from
            // (b-1, b-1); both are plain offsets of +-1 on the phonon index,
            // which runs fastest.
            if (gamma_down > 0.0 && b_col < top) {
                const Complex* r_up = rho.data() + static_cast<std::ptrdiff_t>(col + 1) * dim;
                const double sq_col_up = std::sqrt(double(b_col + 1));
                for (int row = 0; row < dim; ++row) {
                    const int b_row = basis.n_b(row);
                    if (b_row < top)
                        o[row] +=
                            gamma_down * (std::sqrt(double(b_row + 1)) * sq_col_up) * r_up[row + 1];
                }
            }
            if (gamma_up > 0.0 && b_col > 0) {
                const Complex* r_dn = rho.data() + static_cast<std::ptrdiff_t>(col - 1) * dim;
                const double sq_col = sqrt_b[col];
                for (int row = 0; row < dim; ++row)
                    if (basis.n_b(row) > 0)
                        o[row] += gamma_up * (sqrt_b[row] * sq_col) * r_dn[row - 1];
            }
        }
    }
};

}  // namespace

std::vector<TrajectoryPoint> evolve(const DensityOperator& rho0, const ModelConfig& config,
                                    double dt, double t_end, int store_stride) {
    config.validate();
    if (!(t_end > 0.0)) throw ValidationError("evolve requires t_end > 0");
    if (rho0.n_max != config.n_max)
        throw ValidationError("initial state truncation does not match the config");
    rho0.check(0.0);

    const Generator gen(config);
    const double scale = hamiltonian_norm(gen.h) + config.gamma1();
    // At 0.025 the RK4 positivity drift stays inside the -1e-9 eigenvalue floor.
    if (dt <= 0.0) dt = scale > 0.0 ? 0.025 / scale : t_end / 100.0;
    if (dt * scale >= 0.1)
        throw NumericsError("step-size violation: dt*(|H| + gamma1) = " +
                            detail::format_double(dt * scale) + " must stay below 0.1");

    const auto n_steps = static_cast<std::size_t>(std::ceil(t_end / dt - 1e-12));
    const double h_step = t_end / static_cast<double>(n_steps);

    std::vector<TrajectoryPoint> traj;
    traj.push_back({0.0, rho0});
    Eigen::MatrixXcd rho = rho0.matrix;
    const Eigen::Index dim = rho.rows();
    Eigen::MatrixXcd k1(dim, dim), k2(dim, dim), k3(dim, dim), k4(dim, dim), stage(dim, dim);

    for (std::size_t step = 1; step <= n_steps; ++step) {
        gen.apply(rho, k1);
        stage = rho + (0.5 * h_step) * k1;
        gen.apply(stage, k2);
        stage = rho + (0.5 * h_step) * k2;
        gen.apply(stage, k3);
        stage = rho + h_step * k3;
        gen.apply(stage, k4);
        rho += (h_step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

        const bool last = step == n_steps;
        const bool stored =
            last || (store_stride > 0 && step % static_cast<std::size_t>(store_stride) == 0);
        // The generator maps Hermitian to Hermitian; resymmetrizing once in a
        // while only sweeps up floating-point round-off.
        if (stored || step % 32 == 0) rho = (0.5 * (rho + rho.adjoint())).eval();

        if (stored) {
            const double t = last ? t_end : h_step * static_cast<double>(step);
            DensityOperator snap{config.n_max, rho};
            snap.check(t);
            traj.push_back({t, std::move(snap)});
        }
    }
    return traj;
}

namespace {

template <typename F>
double diagonal_expectation(const DensityOperator& rho, F&& weight) {
    const Basis basis(rho.n_max);
    double acc = 0.0;
    for (int k = 0; k < basis.dim; ++k)
        acc += weight(basis.n_s(k), basis.n_as(k), basis.n_b(k)) * rho.matrix(k, k).real();
    return acc;
}

}  // namespace

double mean_stokes(const DensityOperator& rho) {
    return diagonal_expectation(rho, [](int s, int, int) { return double(s); });
}
double mean_anti_stokes(const DensityOperator& rho) {
    return diagonal_expectation(rho, [](int, int a, int) { return double(a); });
}
double mean_phonon(const DensityOperator& rho) {
    return diagonal_expectation(rho, [](int, int, int b) { return double(b); });
}
double mean_stokes_anti_stokes(const DensityOperator& rho) {
    return diagonal_expectation(rho, [](int s, int a, int) { return double(s) * double(a); });
}
double excitation_balance(const DensityOperator& rho) {
    return diagonal_expectation(rho, [](int s, int a, int b) { return double(s - a - b); });
}

double g2_cross(const DensityOperator& rho) {
    const double n_s = mean_stokes(rho);
    const double n_as = mean_anti_stokes(rho);
    if (!(n_s > 0.0) || !(n_as > 0.0))
        throw NumericsError("g2_cross undefined: zero mean occupation (<n_S> = " +
                            detail::format_double(n_s) + ", <n_aS> = " +
                            detail::format_double(n_as) + ")");
    return mean_stokes_anti_stokes(rho) / (n_s * n_as);
}

std::vector<ScanCurve> scan_resonance(const ModelConfig& tpl, const std::vector<double>& shifts,
                                      const std::vector<double>& t1_values, int workers, double dt) {
    tpl.validate();
    if (shifts.empty()) throw ValidationError("scan_resonance requires a non-empty shift grid");
    if (t1_values.empty()) throw ValidationError("scan_resonance requires at least one t1 value");
    const auto [lo, hi] = std::minmax_element(shifts.begin(), shifts.end());
    if (*lo >= tpl.nu_cm1 || *hi <= tpl.nu_cm1)
        throw ValidationError("scan grid must span both sides of nu = " +
                              detail::format_double(tpl.nu_cm1));

    std::vector<ScanCurve> curves(t1_values.size());
    for (std::size_t c = 0; c < t1_values.size(); ++c) {
        curves[c].t1 = t1_values[c];
        curves[c].nu_cm1 = tpl.nu_cm1;
        curves[c].g_s = tpl.g_s;
        curves[c].g_as = tpl.g_as;
        curves[c].n_max = tpl.n_max;
        curves[c].points.resize(shifts.size());
        curves[c].meta["nu"] = detail::format_double(tpl.nu_cm1);
        curves[c].meta["t1"] = detail::format_double(t1_values[c]);
        curves[c].meta["g_s"] = detail::format_double(tpl.g_s);
        curves[c].meta["g_as"] = detail::format_double(tpl.g_as);
        curves[c].meta["n_max"] = std::to_string(tpl.n_max);
        curves[c].meta["n_thermal"] = detail::format_double(tpl.n_thermal);
        curves[c].meta["pulse_duration"] = detail::format_double(tpl.pulse_duration);
    }

    const std::size_t total = t1_values.size() * shifts.size();
    std::exception_ptr first_error;
    std::mutex error_mutex;

    auto eval_range = [&](std::size_t begin, std::size_t stride) {
        for (std::size_t flat = begin; flat < total; flat += stride) {
            const std::size_t c = flat / shifts.size();
            const std::size_t i = flat % shifts.size();
            ModelConfig cfg = tpl;
            cfg.shift_cm1 = shifts[i];
            cfg.t1 = t1_values[c];
            try {
                const auto rho0 = DensityOperator::with_thermal_phonon(cfg.n_max, cfg.n_thermal);
                const auto traj = evolve(rho0, cfg, dt, cfg.pulse_duration);
                const DensityOperator& fin = traj.back().state;

                ScanPoint& pt = curves[c].points[i];
                pt.shift_cm1 = shifts[i];
                pt.n_s = mean_stokes(fin);
                pt.n_as = mean_anti_stokes(fin);
                pt.pair_generation = pt.n_s > 0.0 && pt.n_as > 0.0;
                pt.g2 = pt.pair_generation ? g2_cross(fin)
                                           : std::numeric_limits<double>::quiet_NaN();
                const double window = 5.0 * std::max({cfg.g_s, cfg.g_as, cfg.gamma1()});
                pt.regime = std::abs(shifts[i] - cfg.nu_cm1) <= window
                                ? pairing::Regime::near_resonance
                                : pairing::Regime::virtual_pairing;
            } catch (const NumericsError& e) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error)
                    first_error = std::make_exception_ptr(NumericsError(
                        "scan point (shift = " + detail::format_double(shifts[i]) +
                        ", t1 = " + detail::format_double(t1_values[c]) + "): " + e.what()));
                return;
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };

    const std::size_t pool_size = std::max(1, workers);
    if (pool_size == 1 || total < 2) {
        eval_range(0, 1);
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < pool_size; ++t) pool.emplace_back(eval_range, t, pool_size);
        for (auto& th : pool) th.join();
    }
    if (first_error) std::rethrow_exception(first_error);

    for (auto& curve : curves) {
        double max_g2 = 0.0;
        for (const auto& pt : curve.points)
            if (pt.pair_generation) max_g2 = std::max(max_g2, pt.g2);
        for (auto& pt : curve.points)
            pt.g2_norm = pt.pair_generation && max_g2 > 0.0
                             ? pt.g2 / max_g2
                             : std::numeric_limits<double>::quiet_NaN();
    }
    return curves;
}

void write_scan_csv(const std::vector<ScanCurve>& scans, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot open '" + path.string() + "' for writing");
    out << "# sascor " << kVersion << " resonance-scan\n";
    if (!scans.empty())
        for (const auto& [k, v] : scans.front().meta)
            if (k != "t1") out << "# " << k << ": " << v << "\n";
    out << "shift_cm1,g2_norm,overlap,regime,t1,nu,g_s,g_as,n_max\n";
    for (const auto& curve : scans)
        for (const auto& pt : curve.points)
            out << detail::format_double(pt.shift_cm1) << "," << detail::format_double(pt.g2_norm)
                << ",1," << pairing::to_string(pt.regime) << "," << detail::format_double(curve.t1)
                << "," << detail::format_double(curve.nu_cm1) << ","
                << detail::format_double(curve.g_s) << "," << detail::format_double(curve.g_as)
                << "," << curve.n_max << "\n";
}

void write_scan_json(const std::vector<ScanCurve>& scans, const std::filesystem::path& path) {
    nlohmann::json j;
    j["tool"] = "sascor";
    j["version"] = kVersion;
    j["kind"] = "resonance-scan";
    auto arr = nlohmann::json::array();
    for (const auto& curve : scans) {
        nlohmann::json jc;
        jc["t1"] = curve.t1;
        jc["nu"] = curve.nu_cm1;
        jc["g_s"] = curve.g_s;
        jc["g_as"] = curve.g_as;
        jc["n_max"] = curve.n_max;
        jc["config"] = curve.meta;
        auto pts = nlohmann::json::array();
        for (const auto& pt : curve.points) {
            nlohmann::json e;
            e["shift_cm1"] = pt.shift_cm1;
            if (std::isfinite(pt.g2)) e["g2"] = pt.g2;
            else e["g2"] = nullptr;
            if (std::isfinite(pt.g2_norm)) e["g2_norm"] = pt.g2_norm;
            else e["g2_norm"] = nullptr;
            e["n_s"] = pt.n_s;
            e["n_as"] = pt.n_as;
            e["pair_generation"] = pt.pair_generation;
            e["regime"] = pairing::to_string(pt.regime);
            pts.push_back(std::move(e));
        }
        jc["points"] = std::move(pts);
        arr.push_back(std::move(jc));
    }
    j["curves"] = std::move(arr);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot open '" + path.string() + "' for writing");
    out << j.dump(2) << "\n";
}

std::vector<ScanCurve> read_scan_json(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open '" + path.string() + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path.filename().string() + ": " + e.what());
    }
    if (!j.contains("curves") || !j["curves"].is_array())
        throw ParseError(path.filename().string() + ": missing 'curves' array");
    std::vector<ScanCurve> scans;
    for (const auto& jc : j["curves"]) {
        ScanCurve curve;
        curve.t1 = jc.value("t1", 0.0);
        curve.nu_cm1 = jc.value("nu", 0.0);
        curve.g_s = jc.value("g_s", 0.0);
        curve.g_as = jc.value("g_as", 0.0);
        curve.n_max = jc.value("n_max", 0);
        if (jc.contains("config"))
            for (auto it = jc["config"].begin(); it != jc["config"].end(); ++it)
                curve.meta[it.key()] =
                    it.value().is_string() ? it.value().get<std::string>() : it.value().dump();
        for (const auto& e : jc.value("points", nlohmann::json::array())) {
            ScanPoint pt;
            pt.shift_cm1 = e.at("shift_cm1").get<double>();
            pt.g2 = e.contains("g2") && e["g2"].is_number()
                        ? e["g2"].get<double>()
                        : std::numeric_limits<double>::quiet_NaN();
            pt.g2_norm = e.contains("g2_norm") && e["g2_norm"].is_number()
                             ? e["g2_norm"].get<double>()
                             : std::numeric_limits<double>::quiet_NaN();
            pt.n_s = e.value("n_s", 0.0);
            pt.n_as = e.value("n_as", 0.0);
            pt.pair_generation = e.value("pair_generation", std::isfinite(pt.g2));
            const std::string r = e.value("regime", "virtual");
            pt.regime = r == "near_resonance" ? pairing::Regime::near_resonance
                        : r == "mixed"        ? pairing::Regime::mixed
                                              : pairing::Regime::virtual_pairing;
            curve.points.push_back(pt);
        }
        scans.push_back(std::move(curve));
    }
    return scans;
}

}  // namespace sascor::lindblad
