#ifndef TCT_TESTING_HPP
#define TCT_TESTING_HPP

#include <utility>
#include <vector>

#include "tct/contour.hpp"
#include "tct/contraction.hpp"
#include "tct/dyson.hpp"
#include "tct/limit_laws.hpp"
#include "tct/tensor.hpp"

namespace tct {

struct TestReport {
    double statistic = 0.0;   // T_hat
    double xi_hat = 0.0;
    double sigma_hat = 0.0;
    double normalized = 0.0;  // (T_hat - xi_hat) / sigma_hat
    double alpha = 0.0;
    double z_alpha = 0.0;
    bool reject = false;
    double p_value = 1.0;
    double kappa3_hat = 0.0;
    double kappa4_hat = 0.0;
};

// moment estimators kappa3_hat = (prod c)^{-1} N^{3/2-d} sum T^3,
// kappa4_hat = (prod c)^{-1} N^{2-d} sum T^4 - 3
std::pair<double, double> estimate_cumulants(const DenseTensor& tensor);

// T_hat = ||Phi_d(T, a)||_F^2 - N int x^2 dnu
double alignment_statistic(const DenseTensor& tensor, const UnitVectorSet& vectors,
                           const DysonSolver& solver);

// D = sum_r beta_r^2 sum_{k != l} prod_{j != k,l} <x^(r,j), a^(j)>^2
double drift(const SpikedModel& model, const UnitVectorSet& vectors);

// 1 - Phi(z_alpha - D / sigma)
double theoretical_power(double drift_value, double sigma, double alpha);

// Contour-computed calibration constants for f = x^2 with fixed cumulants and
// vector statistics; reusable across Monte Carlo replicates.
struct AlignmentCalibration {
    double m2 = 0.0; // int x^2 dnu
    double xi = 0.0;
    double sigma_sq = 0.0;
    double sigma = 0.0;
};

AlignmentCalibration calibrate_alignment(const DysonSolver& solver, const VectorStats& stats,
                                         double kappa3, double kappa4,
                                         Convention convention = Convention::MainTextD3);

TestReport alignment_report(const DenseTensor& tensor, const UnitVectorSet& vectors,
                            double alpha, const DysonSolver& solver,
                            const AlignmentCalibration& cal, double kappa3_hat,
                            double kappa4_hat);

// full procedure: estimate cumulants from the tensor, calibrate, decide
TestReport alignment_test(const DenseTensor& tensor, const UnitVectorSet& vectors, double alpha,
                          Convention convention = Convention::MainTextD3);

struct RecoveredSignals {
    std::vector<UnitVectorSet> components;
    bool converged = true; // false when any power iteration hit its cap
};

// per-mode rank-R recovery: mode-0 estimates from the unfolding by power
// iteration with deflation, remaining modes from contractions against the
// vectors already recovered, then one refinement pass for mode 0
RecoveredSignals unfold_recover(const DenseTensor& tensor, int rank);

struct MatchingReport {
    std::vector<TestReport> per_component;
    bool recovery_converged = true;
    bool overall_h0_accepted = true; // accepted only if every component accepts
};

MatchingReport matching_test(const DenseTensor& tensor0, const DenseTensor& tensor1, double alpha,
                             int rank0, Convention convention = Convention::MainTextD3);

} // namespace tct

#endif
