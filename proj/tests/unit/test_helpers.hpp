#ifndef TCT_TEST_HELPERS_HPP
#define TCT_TEST_HELPERS_HPP

#include <Eigen/Dense>
#include <complex>

#include "tct/rng.hpp"
#include "tct/tensor.hpp"

namespace tct::test {

// Closed-form solution for equal thirds: g(z) = (3/4)(sqrt(z^2 - 8/3) - z)
// with the branch that behaves like -1/z at infinity; evaluated as
// sqrt(z - rho) * sqrt(z + rho) so it is continuous off [-rho, rho].
inline std::complex<double> equal_thirds_g(std::complex<double> z) {
    const double rho = std::sqrt(8.0 / 3.0);
    const std::complex<double> s = std::sqrt(z - rho) * std::sqrt(z + rho);
    return 0.75 * (s - z);
}

// density of the equal-thirds LSD: (3/4pi) sqrt(8/3 - x^2)
inline double equal_thirds_density(double x) {
    const double r2 = 8.0 / 3.0 - x * x;
    return r2 <= 0.0 ? 0.0 : 0.75 / 3.141592653589793 * std::sqrt(r2);
}

inline Eigen::VectorXd random_unit(int n, Rng& rng) {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = rng.next_gaussian();
    return v.normalized();
}

inline UnitVectorSet random_unit_set(const DimensionProfile& profile, Rng& rng) {
    std::vector<Eigen::VectorXd> vs;
    for (int j = 0; j < profile.mode_count(); ++j) vs.push_back(random_unit(profile.dim(j), rng));
    return UnitVectorSet(profile, std::move(vs));
}

inline Eigen::VectorXd random_ratios(int d, Rng& rng) {
    Eigen::VectorXd c(d);
    for (int i = 0; i < d; ++i) c[i] = 0.2 + rng.next_unit();
    return c / c.sum();
}

} // namespace tct::test

#endif
