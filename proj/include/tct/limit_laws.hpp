#ifndef TCT_LIMIT_LAWS_HPP
#define TCT_LIMIT_LAWS_HPP

#include <Eigen/Dense>
#include <complex>

#include "tct/dyson.hpp"
#include "tct/tensor.hpp"

namespace tct {

// g(z) solved at a point, passed around so contour code can cache one solve
// per quadrature node.
struct GValue {
    std::complex<double> z;
    Eigen::VectorXcd g;
    std::complex<double> sum;
};

// The fourth-cumulant block and the third-cumulant mean term appear in two
// inconsistent forms in the source material; both are selectable. At d = 3
// MainTextD3 is the adjudicated default (covariance symmetry + Monte Carlo),
// GeneralD is the only form defined for d > 3.
enum class Convention { MainTextD3, GeneralD };

// Everything needed to evaluate the CLT mean function mu_N(z) and covariance
// function C_N(z1, z2): ratios and g via the Dyson solver, direction-vector
// statistics, and noise cumulants.
class LimitContext {
public:
    LimitContext(const DysonSolver& solver, VectorStats stats, double kappa3, double kappa4,
                 Convention convention = Convention::MainTextD3);

    const DysonSolver& solver() const { return *solver_; }
    const VectorStats& stats() const { return stats_; }
    int mode_count() const { return d_; }
    double kappa3() const { return kappa3_; }
    double kappa4() const { return kappa4_; }
    Convention convention() const { return convention_; }

    GValue eval(std::complex<double> z) const;

    // W(z) = -Gamma(z)^{-1}
    Eigen::MatrixXcd w_matrix(const GValue& gz) const;
    // Pi(z1,z2) = I - diag(c^{-1} o g(z1) o g(z2)) S
    Eigen::MatrixXcd pi_matrix(const GValue& g1, const GValue& g2) const;
    // V = Pi^{-1} diag(c^{-1} o g(z1) o g(z2))
    Eigen::MatrixXcd v_matrix(const GValue& g1, const GValue& g2) const;
    // scriptV_{st} = sum_{l != s} (Vtilde_l)_{st}
    Eigen::MatrixXcd script_v(const GValue& g1, const GValue& g2) const;
    // fourth-cumulant block (convention dependent)
    Eigen::MatrixXcd u_matrix(const GValue& g1, const GValue& g2) const;

    Eigen::VectorXcd mean_vector(const GValue& gz) const;
    std::complex<double> mu_function(const GValue& gz) const;
    std::complex<double> cov_function(const GValue& g1, const GValue& g2) const;

    std::complex<double> mu_function(std::complex<double> z) const { return mu_function(eval(z)); }
    std::complex<double> cov_function(std::complex<double> z1, std::complex<double> z2) const {
        return cov_function(eval(z1), eval(z2));
    }

    // resolvent entry prediction for diagnostics
    std::complex<double> entrywise_prediction(const GValue& gz, int s, int t, int i_s, int i_t,
                                              const UnitVectorSet& vectors) const;

private:
    Eigen::MatrixXcd gamma_matrix(const GValue& gz) const;

    const DysonSolver* solver_;
    VectorStats stats_;
    int d_;
    double kappa3_;
    double kappa4_;
    Convention convention_;
    Eigen::VectorXd inv_c_;
};

} // namespace tct

#endif
