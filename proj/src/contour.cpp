#include "tct/contour.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "tct/quadrature.hpp"

namespace tct {

namespace {
using Complex = std::complex<double>;
constexpr Complex kI(0.0, 1.0);
constexpr double kImagBudget = 1e-6;
} // namespace

ContourSpec::ContourSpec(double e0, double eta0, int nodes)
    : half_width(e0), half_height(eta0), nodes_per_side(nodes) {
    if (e0 <= 0.0 || eta0 <= 0.0) throw ArgumentError("contour half-sizes must be positive");
    if (nodes < 16) throw ArgumentError("need at least 16 nodes per side");
}

ContourSpec ContourSpec::default_for(const DysonSolver& solver, double offset, double eta0, int nodes) {
    const double e0 = std::max(solver.support_edge(), solver.spectral_bound()) + offset;
    if (offset <= 0.0) throw ArgumentError("contour must stay strictly outside the spectral bound");
    return ContourSpec(e0, eta0, nodes);
}

ContourSpec ContourSpec::enlarged(double extra_width, double extra_height) const {
    return ContourSpec(half_width + extra_width, half_height + extra_height, nodes_per_side);
}

std::vector<Complex> ContourSpec::nodes() const {
    const GaussLegendreRule rule = gauss_legendre(nodes_per_side);
    std::vector<Complex> out;
    out.reserve(static_cast<std::size_t>(4 * nodes_per_side));
    // counterclockwise: bottom (left to right), right (up), top (right to left), left (down)
    for (int i = 0; i < nodes_per_side; ++i)
        out.emplace_back(half_width * rule.nodes[i], -half_height);
    for (int i = 0; i < nodes_per_side; ++i)
        out.emplace_back(half_width, half_height * rule.nodes[i]);
    for (int i = 0; i < nodes_per_side; ++i)
        out.emplace_back(-half_width * rule.nodes[i], half_height);
    for (int i = 0; i < nodes_per_side; ++i)
        out.emplace_back(-half_width, -half_height * rule.nodes[i]);
    return out;
}

std::vector<Complex> ContourSpec::weights() const {
    const GaussLegendreRule rule = gauss_legendre(nodes_per_side);
    std::vector<Complex> out;
    out.reserve(static_cast<std::size_t>(4 * nodes_per_side));
    for (int i = 0; i < nodes_per_side; ++i) out.emplace_back(half_width * rule.weights[i], 0.0);
    for (int i = 0; i < nodes_per_side; ++i) out.push_back(kI * (half_height * rule.weights[i]));
    for (int i = 0; i < nodes_per_side; ++i) out.emplace_back(-half_width * rule.weights[i], 0.0);
    for (int i = 0; i < nodes_per_side; ++i) out.push_back(-kI * (half_height * rule.weights[i]));
    return out;
}

Complex contour_integrate(const AnalyticFn& fn, const ContourSpec& contour) {
    const auto nodes = contour.nodes();
    const auto weights = contour.weights();
    std::vector<Complex> terms(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        try {
            terms[i] = weights[i] * fn(nodes[i]);
        } catch (const std::exception& e) {
            std::ostringstream msg;
            msg << "integrand failed at contour node z = (" << nodes[i].real() << ", "
                << nodes[i].imag() << "i): " << e.what();
            throw NumericalError(msg.str());
        }
    }
    return pairwise_sum(terms);
}

double moment_via_contour(const DysonSolver& solver, const AnalyticFn& f, const ContourSpec& contour) {
    const Complex integral = contour_integrate(
        [&](Complex z) { return f(z) * solver.stieltjes(z); }, contour);
    const Complex value = -integral / (2.0 * std::numbers::pi * kI);
    if (std::abs(value.imag()) > kImagBudget)
        throw NumericalError("moment contour integral has nonreal residue " +
                             std::to_string(value.imag()));
    return value.real();
}

double xi_limit(const LimitContext& ctx, const AnalyticFn& f, const ContourSpec& contour) {
    const Complex integral =
        contour_integrate([&](Complex z) { return f(z) * ctx.mu_function(z); }, contour);
    const Complex value = -integral / (2.0 * std::numbers::pi * kI);
    if (std::abs(value.imag()) > kImagBudget)
        throw NumericalError("xi contour integral has nonreal residue " +
                             std::to_string(value.imag()));
    return value.real();
}

SigmaLimit sigma_limit(const LimitContext& ctx, const AnalyticFn& f, const ContourSpec& c1,
                       const ContourSpec& c2) {
    ContourCalibration cal(ctx, c1, c2);
    const LimitConstants constants = cal.constants(f);
    return SigmaLimit{constants.sigma_sq, constants.sigma};
}

ContourCalibration::ContourCalibration(const LimitContext& ctx, const ContourSpec& c1,
                                       const ContourSpec& c2) {
    if (c2.half_width <= c1.half_width || c2.half_height <= c1.half_height)
        throw ArgumentError("variance contours must be disjoint: the second must enclose the first");
    n1_ = c1.nodes();
    w1_ = c1.weights();
    n2_ = c2.nodes();
    w2_ = c2.weights();

    std::vector<GValue> gv1(n1_.size()), gv2(n2_.size());
    for (std::size_t i = 0; i < n1_.size(); ++i) gv1[i] = ctx.eval(n1_[i]);
    for (std::size_t j = 0; j < n2_.size(); ++j) gv2[j] = ctx.eval(n2_[j]);

    mu1_.resize(n1_.size());
    g1_.resize(n1_.size());
    for (std::size_t i = 0; i < n1_.size(); ++i) {
        mu1_[i] = ctx.mu_function(gv1[i]);
        g1_[i] = gv1[i].sum;
    }
    cov_.assign(n1_.size(), std::vector<Complex>(n2_.size()));
    for (std::size_t i = 0; i < n1_.size(); ++i)
        for (std::size_t j = 0; j < n2_.size(); ++j)
            cov_[i][j] = ctx.cov_function(gv1[i], gv2[j]);
}

LimitConstants ContourCalibration::constants(const AnalyticFn& f) const {
    std::vector<Complex> f1(n1_.size()), f2(n2_.size());
    for (std::size_t i = 0; i < n1_.size(); ++i) f1[i] = f(n1_[i]);
    for (std::size_t j = 0; j < n2_.size(); ++j) f2[j] = f(n2_[j]);

    std::vector<Complex> xi_terms(n1_.size());
    for (std::size_t i = 0; i < n1_.size(); ++i) xi_terms[i] = w1_[i] * f1[i] * mu1_[i];
    const Complex xi_c = -pairwise_sum(xi_terms) / (2.0 * std::numbers::pi * kI);
    if (std::abs(xi_c.imag()) > kImagBudget)
        throw NumericalError("xi contour integral has nonreal residue " +
                             std::to_string(xi_c.imag()));

    std::vector<Complex> outer(n1_.size());
    for (std::size_t i = 0; i < n1_.size(); ++i) {
        std::vector<Complex> inner(n2_.size());
        for (std::size_t j = 0; j < n2_.size(); ++j) inner[j] = w2_[j] * f2[j] * cov_[i][j];
        outer[i] = w1_[i] * f1[i] * pairwise_sum(inner);
    }
    const double pi2 = std::numbers::pi * std::numbers::pi;
    const Complex var_c = -pairwise_sum(outer) / (4.0 * pi2);
    if (std::abs(var_c.imag()) > kImagBudget)
        throw NumericalError("variance contour integral has nonreal residue " +
                             std::to_string(var_c.imag()));
    if (var_c.real() < -1e-8)
        throw NumericalError("variance contour integral is negative: " +
                             std::to_string(var_c.real()));
    const double variance = std::max(var_c.real(), 0.0);
    return LimitConstants{xi_c.real(), variance, std::sqrt(variance)};
}

double ContourCalibration::lsd_integral(const AnalyticFn& f) const {
    std::vector<Complex> terms(n1_.size());
    for (std::size_t i = 0; i < n1_.size(); ++i) terms[i] = w1_[i] * f(n1_[i]) * g1_[i];
    const Complex value = -pairwise_sum(terms) / (2.0 * std::numbers::pi * kI);
    if (std::abs(value.imag()) > kImagBudget)
        throw NumericalError("LSD integral has nonreal residue " + std::to_string(value.imag()));
    return value.real();
}

AnalyticFn analytic_function(const std::string& name) {
    if (name == "x2") return [](Complex z) { return z * z; };
    if (name == "expx") return [](Complex z) { return std::exp(z); };
    if (name == "cosx") return [](Complex z) { return std::cos(z); };
    if (name == "ratio")
        return [](Complex z) { return std::exp(z * z) / std::sqrt(1.0 + z * z * z * z); };
    if (name.rfind("poly:", 0) == 0) {
        std::vector<double> coeffs;
        std::istringstream ss(name.substr(5));
        std::string tok;
        while (std::getline(ss, tok, ',')) coeffs.push_back(std::stod(tok));
        if (coeffs.empty()) throw ConfigError("empty polynomial coefficient list");
        return [coeffs](Complex z) {
            Complex acc(0.0, 0.0);
            for (std::size_t k = coeffs.size(); k-- > 0;) acc = acc * z + coeffs[k];
            return acc;
        };
    }
    throw ConfigError("unknown test function '" + name + "'");
}

std::vector<std::string> analytic_function_names() { return {"x2", "expx", "cosx", "ratio"}; }

} // namespace tct
