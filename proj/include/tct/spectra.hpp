#ifndef TCT_SPECTRA_HPP
#define TCT_SPECTRA_HPP

#include <Eigen/Dense>
#include <functional>

#include "tct/errors.hpp"

namespace tct {

struct Spectrum {
    Eigen::VectorXd eigenvalues; // ascending
    Eigen::Index count() const { return eigenvalues.size(); }
};

// Cyclic-by-rows Jacobi. Sweeps until the off-diagonal Frobenius norm drops
// below tol * ||M||_F. Eigenvalues only.
Spectrum symmetric_eigenvalues(const Eigen::MatrixXd& m, double tol = 1e-11);

double empirical_lss(const Spectrum& spectrum, const std::function<double(double)>& f);

// G_N(f) = sum f(lambda) - N * int f dnu; the reference integral is supplied
// by the caller (moment or contour route)
double g_n_statistic(const Spectrum& spectrum, const std::function<double(double)>& f,
                     double f_integral);

} // namespace tct

#endif
