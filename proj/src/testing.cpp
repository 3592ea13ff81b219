#include "tct/testing.hpp"

#include <cmath>

#include "tct/quadrature.hpp"
#include "tct/rng.hpp"
#include "tct/stats.hpp"

namespace tct {

std::pair<double, double> estimate_cumulants(const DenseTensor& tensor) {
    const auto& profile = tensor.profile();
    const double count = static_cast<double>(profile.element_count());
    const double n_total = static_cast<double>(profile.total_dim());
    const auto& v = tensor.values();
    double s3 = 0.0, s4 = 0.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const double x = v[i];
        const double x2 = x * x;
        s3 += x2 * x;
        s4 += x2 * x2;
    }
    // (prod c_l)^{-1} N^{3/2-d} = N^{3/2} / prod n_l, likewise for the fourth
    const double k3 = std::pow(n_total, 1.5) * s3 / count;
    const double k4 = n_total * n_total * s4 / count - 3.0;
    return {k3, k4};
}

double alignment_statistic(const DenseTensor& tensor, const UnitVectorSet& vectors,
                           const DysonSolver& solver) {
    if (tensor.profile() != vectors.profile())
        throw DimensionError("tensor and vector profiles differ");
    const double fro = frobenius_sq(phi_d(tensor, vectors));
    return fro - static_cast<double>(tensor.profile().total_dim()) * solver.moment(2);
}

double drift(const SpikedModel& model, const UnitVectorSet& vectors) {
    if (model.profile() != vectors.profile())
        throw DimensionError("model and vector profiles differ");
    const int d = model.profile().mode_count();
    double total = 0.0;
    for (int r = 0; r < model.rank(); ++r) {
        Eigen::VectorXd overlap_sq(d);
        for (int j = 0; j < d; ++j) {
            const double o = model.signal(r).vector(j).dot(vectors.vector(j));
            overlap_sq[j] = o * o;
        }
        double sum = 0.0;
        for (int k = 0; k < d; ++k)
            for (int l = 0; l < d; ++l) {
                if (k == l) continue;
                double prod = 1.0;
                for (int j = 0; j < d; ++j)
                    if (j != k && j != l) prod *= overlap_sq[j];
                sum += prod;
            }
        total += model.beta(r) * model.beta(r) * sum;
    }
    return total;
}

double theoretical_power(double drift_value, double sigma, double alpha) {
    if (sigma <= 0.0) throw ArgumentError("theoretical power requires sigma > 0");
    const double z_alpha = normal_quantile(1.0 - alpha);
    return 1.0 - normal_cdf(z_alpha - drift_value / sigma);
}

AlignmentCalibration calibrate_alignment(const DysonSolver& solver, const VectorStats& stats,
                                         double kappa3, double kappa4, Convention convention) {
    LimitContext ctx(solver, stats, kappa3, kappa4, convention);
    const ContourSpec inner = ContourSpec::default_for(solver);
    const ContourSpec outer = inner.enlarged();
    ContourCalibration cal(ctx, inner, outer);
    const LimitConstants constants = cal.constants(analytic_function("x2"));
    AlignmentCalibration out;
    out.m2 = solver.moment(2);
    out.xi = constants.xi;
    out.sigma_sq = constants.sigma_sq;
    out.sigma = constants.sigma;
    return out;
}

TestReport alignment_report(const DenseTensor& tensor, const UnitVectorSet& vectors, double alpha,
                            const DysonSolver& solver, const AlignmentCalibration& cal,
                            double kappa3_hat, double kappa4_hat) {
    if (alpha <= 0.0 || alpha >= 1.0) throw ArgumentError("alpha must lie in (0,1)");
    TestReport report;
    report.alpha = alpha;
    report.z_alpha = normal_quantile(1.0 - alpha);
    report.kappa3_hat = kappa3_hat;
    report.kappa4_hat = kappa4_hat;
    report.xi_hat = cal.xi;
    report.sigma_hat = cal.sigma;

    const double fro = frobenius_sq(phi_d(tensor, vectors));
    report.statistic = fro - static_cast<double>(tensor.profile().total_dim()) * cal.m2;
    report.normalized = (report.statistic - cal.xi) / cal.sigma;
    report.reject = report.normalized > report.z_alpha;
    report.p_value = 1.0 - normal_cdf(report.normalized);
    return report;
}

TestReport alignment_test(const DenseTensor& tensor, const UnitVectorSet& vectors, double alpha,
                          Convention convention) {
    if (tensor.profile() != vectors.profile())
        throw DimensionError("tensor and vector profiles differ");

    double k3 = 0.0, k4 = 0.0;
    try {
        std::tie(k3, k4) = estimate_cumulants(tensor);
    } catch (const std::exception& e) {
        throw NumericalError(std::string("alignment test, cumulant stage: ") + e.what());
    }
    // guard against estimator excursions below the attainable bound
    k4 = std::max(k4, -2.0);

    DysonSolver solver(tensor.profile().ratios());
    AlignmentCalibration cal;
    try {
        cal = calibrate_alignment(solver, vector_stats(vectors), k3, k4, convention);
    } catch (const std::exception& e) {
        throw NumericalError(std::string("alignment test, calibration stage: ") + e.what());
    }
    try {
        return alignment_report(tensor, vectors, alpha, solver, cal, k3, k4);
    } catch (const std::exception& e) {
        throw NumericalError(std::string("alignment test, decision stage: ") + e.what());
    }
}

namespace {

void fix_sign(Eigen::VectorXd& v) {
    Eigen::Index imax = 0;
    v.cwiseAbs().maxCoeff(&imax);
    if (v[imax] < 0.0) v = -v;
}

// top eigenvector of a symmetric PSD matrix by power iteration; returns false
// on hitting the iteration cap
bool power_iterate(const Eigen::MatrixXd& gram, Eigen::VectorXd& vec) {
    constexpr int kMaxIter = 500;
    constexpr double kTol = 1e-10;
    // fixed pseudo-random start: almost surely not orthogonal to the top space
    Rng rng(0x5eedull);
    vec.resize(gram.rows());
    for (Eigen::Index i = 0; i < vec.size(); ++i) vec[i] = rng.next_gaussian();
    vec.normalize();
    double rayleigh = vec.dot(gram * vec);
    for (int it = 0; it < kMaxIter; ++it) {
        Eigen::VectorXd next = gram * vec;
        const double norm = next.norm();
        if (norm == 0.0) return false;
        next /= norm;
        const double r2 = next.dot(gram * next);
        vec = next;
        if (std::abs(r2 - rayleigh) <= kTol * std::max(1.0, std::abs(r2))) return true;
        rayleigh = r2;
    }
    return false;
}

// contract the leading mode of a flat row-major tensor against u:
// out[rest] = sum_i u[i] * values[i * rest_size + rest]
Eigen::VectorXd contract_leading(const Eigen::VectorXd& values, const Eigen::VectorXd& u) {
    const Eigen::Index n0 = u.size();
    const Eigen::Index rest = values.size() / n0;
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> a(
        values.data(), n0, rest);
    return a.transpose() * u;
}

} // namespace

RecoveredSignals unfold_recover(const DenseTensor& tensor, int rank) {
    if (rank < 1) throw ArgumentError("rank must be >= 1");
    const auto& profile = tensor.profile();
    const int d = profile.mode_count();
    const Eigen::Index n0 = profile.dim(0);
    const Eigen::Index rest = profile.element_count() / n0;

    RecoveredSignals out;

    // mode-0 unfolding Gram matrix, deflated once per component
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
        unfolded(tensor.values().data(), n0, rest);
    Eigen::MatrixXd gram = unfolded * unfolded.transpose();

    std::vector<Eigen::VectorXd> mode0;
    for (int r = 0; r < rank; ++r) {
        Eigen::VectorXd u;
        if (!power_iterate(gram, u)) out.converged = false;
        // re-orthogonalize against previous components
        for (const auto& prev : mode0) u -= prev.dot(u) * prev;
        const double norm = u.norm();
        if (norm < 1e-14) throw NumericalError("deflated unfolding collapsed");
        u /= norm;
        const double lambda = u.dot(gram * u);
        gram -= lambda * u * u.transpose();
        mode0.push_back(std::move(u));
    }

    for (int r = 0; r < rank; ++r) {
        std::vector<Eigen::VectorXd> vecs(static_cast<std::size_t>(d));
        vecs[0] = mode0[static_cast<std::size_t>(r)];

        // cascade: strip one leading mode at a time
        Eigen::VectorXd current = contract_leading(tensor.values(), vecs[0]);
        for (int mode = 1; mode < d - 2; ++mode) {
            const Eigen::Index nm = profile.dim(mode);
            const Eigen::Index tail = current.size() / nm;
            Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
                mat(current.data(), nm, tail);
            Eigen::MatrixXd g = mat * mat.transpose();
            Eigen::VectorXd u;
            if (!power_iterate(g, u)) out.converged = false;
            vecs[static_cast<std::size_t>(mode)] = u;
            current = contract_leading(current, u);
        }
        // final two modes: top singular pair of the remaining matrix
        {
            const Eigen::Index nm = profile.dim(d - 2);
            const Eigen::Index tail = current.size() / nm;
            Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
                mat(current.data(), nm, tail);
            Eigen::MatrixXd g = mat * mat.transpose();
            Eigen::VectorXd u;
            if (!power_iterate(g, u)) out.converged = false;
            Eigen::VectorXd v = mat.transpose() * u;
            const double vn = v.norm();
            if (vn < 1e-14) throw NumericalError("trailing-mode recovery collapsed");
            vecs[static_cast<std::size_t>(d - 2)] = u;
            vecs[static_cast<std::size_t>(d - 1)] = v / vn;
        }
        // refinement: re-estimate mode 0 by contracting every other mode,
        // w_i = T(e_i, x^(1), ..., x^(d-1))
        {
            Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
                a(tensor.values().data(), n0, rest);
            Eigen::VectorXd weight = Eigen::VectorXd::Ones(1);
            for (int mode = 1; mode < d; ++mode) {
                Eigen::VectorXd next(weight.size() * profile.dim(mode));
                Eigen::Index k = 0;
                for (Eigen::Index i = 0; i < weight.size(); ++i)
                    for (Eigen::Index j = 0; j < profile.dim(mode); ++j)
                        next[k++] = weight[i] * vecs[static_cast<std::size_t>(mode)][j];
                weight.swap(next);
            }
            const Eigen::VectorXd w = a * weight;
            const double wn = w.norm();
            if (wn > 1e-14) vecs[0] = w / wn;
        }
        for (auto& v : vecs) fix_sign(v);
        out.components.emplace_back(profile, std::move(vecs));
    }
    return out;
}

MatchingReport matching_test(const DenseTensor& tensor0, const DenseTensor& tensor1, double alpha,
                             int rank0, Convention convention) {
    if (tensor0.profile() != tensor1.profile())
        throw DimensionError("matching test requires equal profiles");
    RecoveredSignals rec = unfold_recover(tensor0, rank0);
    MatchingReport report;
    report.recovery_converged = rec.converged;
    for (const auto& component : rec.components) {
        report.per_component.push_back(alignment_test(tensor1, component, alpha, convention));
        if (report.per_component.back().reject) report.overall_h0_accepted = false;
    }
    return report;
}

} // namespace tct
