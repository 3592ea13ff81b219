#ifndef TCT_DYSON_HPP
#define TCT_DYSON_HPP

#include <Eigen/Dense>
#include <complex>
#include <map>
#include <mutex>

#include "tct/errors.hpp"

namespace tct {

// Solver for the vector self-consistent equation
//     -c_j / g_j(z) = z + sum_{k != j} g_k(z),   Im z > 0,
// whose component sum is the Stieltjes transform of the limiting spectral
// distribution of the contracted noise matrix. Lower half-plane evaluation is
// routed through g(conj z) = conj g(z).
class DysonSolver {
public:
    struct Settings {
        double tol = 1e-12;          // residual ||c/g + z + S g||_inf target
        int max_iter = 20000;        // fixed-point budget per evaluation
        double damping = 1.0;        // initial mixing weight, halved on residual increase
        double edge_eta = 1e-7;      // eta used for the edge scan and moments
        double edge_threshold = 1e-5; // density threshold defining the edge
    };

    explicit DysonSolver(Eigen::VectorXd ratios);
    DysonSolver(Eigen::VectorXd ratios, Settings settings);

    int mode_count() const { return static_cast<int>(c_.size()); }
    const Eigen::VectorXd& ratios() const { return c_; }
    const Settings& settings() const { return settings_; }

    // g(z) componentwise; tol < 0 means the solver default
    Eigen::VectorXcd solve(std::complex<double> z, double tol = -1.0) const;
    // sum_j g_j(z)
    std::complex<double> stieltjes(std::complex<double> z) const;
    // pi^{-1} Im sum_j g_j(E + i eta)
    double density(double E, double eta) const;
    // right support edge, by bisection of the smoothed density (cached)
    double support_edge() const;
    // v_d = 2(d-1) sum_j sqrt(c_j)
    double spectral_bound() const;
    // the measure has a point mass at 0 iff max_j c_j >= 1/2
    bool has_point_mass() const;
    // int x^k dnu for even k, by Gauss-Legendre quadrature of the smoothed
    // density with a Richardson step in eta (cached)
    double moment(int k) const;

private:
    Eigen::VectorXcd solve_upper(std::complex<double> z, double tol) const;
    double fixed_point(std::complex<double> z, Eigen::VectorXcd& u, double target, int budget) const;
    bool newton_polish(std::complex<double> z, Eigen::VectorXcd& u, double tol, int budget) const;
    double residual_inf(std::complex<double> z, const Eigen::VectorXcd& u) const;
    double moment_at_eta(int k, double eta, double edge) const;

    Eigen::VectorXd c_;
    Settings settings_;
    mutable std::once_flag edge_once_;
    mutable double edge_ = 0.0;
    mutable std::mutex moment_mutex_;
    mutable std::map<int, double> moment_cache_;
};

} // namespace tct

#endif
