#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <complex>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "sascor/pairing_core.hpp"

namespace sascor::lindblad {

// Single vibrational mode coupled to one Stokes and one anti-Stokes photon
// mode, classical undepleted pump absorbed into the couplings. All rates and
// frequencies in cm^-1, times in 1/cm^-1.
struct ModelConfig {
    double nu_cm1 = 1640.0;     // phonon frequency
    double shift_cm1 = 1640.0;  // filter shift; Stokes two-photon detuning = shift - nu
    double g_s = 0.05;          // Stokes coupling
    double g_as = 0.05;         // anti-Stokes coupling
    double t1 = 1.0;            // phonon lifetime; relaxation rate gamma1 = 1/t1; <= 0 disables
    double n_thermal = 0.0;     // mean thermal phonon occupation
    int n_max = 3;              // Fock truncation per mode
    double pulse_duration = 5.0;

    double gamma1() const { return t1 > 0.0 ? 1.0 / t1 : 0.0; }
    double detuning() const { return shift_cm1 - nu_cm1; }
    void validate() const;
};

using SparseOp = Eigen::SparseMatrix<std::complex<double>>;

// Truncated three-mode state, dims (n_max+1)^3 ordered Stokes (x) anti-Stokes
// (x) phonon: index = (n_S*(n_max+1) + n_aS)*(n_max+1) + n_b.
struct DensityOperator {
    int n_max = 0;
    Eigen::MatrixXcd matrix;

    static DensityOperator vacuum(int n_max);
    // Photon vacuum, phonon in a truncated thermal state with mean n_thermal.
    static DensityOperator with_thermal_phonon(int n_max, double n_thermal);

    Eigen::Index dim() const { return matrix.rows(); }
    double trace_error() const;        // |tr - 1|
    double hermiticity_error() const;  // max |rho - rho^dag|
    double min_eigenvalue() const;
    // Hermitian to 1e-12, trace 1e-9, eigenvalues >= -1e-9; throws
    // NumericsError with the time stamp on breach.
    void check(double t_stamp) const;
};

// Rotating-frame Hamiltonian
//   H = d_S aS'aS + d_aS aAS'aAS + g_s (aS' b' + aS b) + g_as (aAS' b + aAS b')
// with d_S = shift - nu and d_aS = -(shift - nu). Hermitian by construction.
// A Stokes event creates a phonon, an anti-Stokes event consumes one, so
// n_S - n_aS - n_b commutes with H.
SparseOp build_hamiltonian(const ModelConfig& config);

// Infinity-norm bound used by the step-size precondition.
double hamiltonian_norm(const SparseOp& h);

struct TrajectoryPoint {
    double t;
    DensityOperator state;
};

// Fixed-step RK4 on the Lindblad equation
//   drho/dt = -i[H,rho] + gamma1 (n+1) D[b] rho + gamma1 n D[b'] rho.
// dt <= 0 selects 0.025/(|H| + gamma1); an explicit dt must satisfy
// dt*(|H| + gamma1) < 0.1. Stored points (every store_stride steps, plus the
// endpoints) are checked against the DensityOperator invariants.
std::vector<TrajectoryPoint> evolve(const DensityOperator& rho0, const ModelConfig& config,
                                    double dt, double t_end, int store_stride = 0);

double mean_stokes(const DensityOperator& rho);
double mean_anti_stokes(const DensityOperator& rho);
double mean_phonon(const DensityOperator& rho);
double mean_stokes_anti_stokes(const DensityOperator& rho);  // <n_S n_aS>
double excitation_balance(const DensityOperator& rho);       // <n_S - n_aS - n_b>

// <aS' aAS' aAS aS> / (<aS' aS><aAS' aAS>); throws NumericsError when either
// mean occupation vanishes.
double g2_cross(const DensityOperator& rho);

struct ScanPoint {
    double shift_cm1;
    double g2;       // NaN when no pairs are generated
    double g2_norm;  // g2 / max over this curve
    double n_s;
    double n_as;
    bool pair_generation;
    pairing::Regime regime;
};

struct ScanCurve {
    double t1;
    double nu_cm1;
    double g_s;
    double g_as;
    int n_max;
    std::vector<ScanPoint> points;
    std::map<std::string, std::string> meta;
};

// One curve per T1 value: evolve from the photon vacuum (phonon thermal at
// the template's n_thermal) over pulse_duration and record g2_cross at the
// end. Points are flagged near_resonance within 5*max(g_s, g_as, gamma1) of
// nu. dt <= 0 selects the automatic step per point. Deterministic for any
// worker count.
std::vector<ScanCurve> scan_resonance(const ModelConfig& tpl, const std::vector<double>& shifts,
                                      const std::vector<double>& t1_values, int workers = 1,
                                      double dt = 0.0);

// Same CSV schema as the correlation curve plus t1,nu,g_s,g_as,n_max columns.
void write_scan_csv(const std::vector<ScanCurve>& scans, const std::filesystem::path& path);
void write_scan_json(const std::vector<ScanCurve>& scans, const std::filesystem::path& path);
std::vector<ScanCurve> read_scan_json(const std::filesystem::path& path);

}  // namespace sascor::lindblad
