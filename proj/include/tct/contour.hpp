#ifndef TCT_CONTOUR_HPP
#define TCT_CONTOUR_HPP

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "tct/limit_laws.hpp"

namespace tct {

using AnalyticFn = std::function<std::complex<double>(std::complex<double>)>;

// Axis-aligned rectangular contour, traversed counterclockwise, composite
// Gauss-Legendre on each side.
struct ContourSpec {
    double half_width;       // E0
    double half_height;      // eta0
    int nodes_per_side = 64;

    ContourSpec(double e0, double eta0, int nodes = 64);

    // The CLT contour rule: E0 = max(edge, bound) + offset. The second,
    // enclosing contour for the variance integral is nested strictly outside.
    static ContourSpec default_for(const DysonSolver& solver, double offset = 0.5,
                                   double eta0 = 0.1, int nodes = 64);
    ContourSpec enlarged(double extra_width = 0.25, double extra_height = 0.05) const;

    // nodes and complex dz-weights, fixed ordering
    std::vector<std::complex<double>> nodes() const;
    std::vector<std::complex<double>> weights() const;
};

std::complex<double> contour_integrate(const AnalyticFn& fn, const ContourSpec& contour);

// int f dnu via -(1/2 pi i) contour integral of f(z) g(z)
double moment_via_contour(const DysonSolver& solver, const AnalyticFn& f, const ContourSpec& contour);

// xi_N = -(1/2 pi i) contour integral of f(z) mu_N(z)
double xi_limit(const LimitContext& ctx, const AnalyticFn& f, const ContourSpec& contour);

struct SigmaLimit {
    double variance;
    double sigma;
};

// sigma_N^2 = -(1/4 pi^2) double contour integral of f(z1) f(z2) C_N(z1, z2);
// contours must be disjoint (c2 strictly encloses c1)
SigmaLimit sigma_limit(const LimitContext& ctx, const AnalyticFn& f, const ContourSpec& c1,
                       const ContourSpec& c2);

// Both calibration constants for one test function, sharing the cached g and
// covariance grids; cheaper than separate xi/sigma calls when evaluating
// several test functions on the same context.
struct LimitConstants {
    double xi;
    double sigma_sq;
    double sigma;
};

class ContourCalibration {
public:
    ContourCalibration(const LimitContext& ctx, const ContourSpec& c1, const ContourSpec& c2);
    LimitConstants constants(const AnalyticFn& f) const;
    double lsd_integral(const AnalyticFn& f) const; // int f dnu on the inner contour

private:
    std::vector<std::complex<double>> n1_, w1_, n2_, w2_;
    std::vector<std::complex<double>> mu1_;                 // mu_N at inner nodes
    std::vector<std::complex<double>> g1_;                  // sum g at inner nodes
    std::vector<std::vector<std::complex<double>>> cov_;    // C_N on the node grid
};

// named analytic test functions: x2, expx, cosx, ratio (exp(x^2)/sqrt(1+x^4)),
// poly:c0,c1,... for polynomials in ascending powers
AnalyticFn analytic_function(const std::string& name);
std::vector<std::string> analytic_function_names();

} // namespace tct

#endif
