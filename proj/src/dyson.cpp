#include "tct/dyson.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "tct/quadrature.hpp"

namespace tct {

namespace {
using Complex = std::complex<double>;

double min_imag(const Eigen::VectorXcd& u) {
    double m = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < u.size(); ++j) m = std::min(m, u[j].imag());
    return m;
}
} // namespace

DysonSolver::DysonSolver(Eigen::VectorXd ratios) : DysonSolver(std::move(ratios), Settings{}) {}

DysonSolver::DysonSolver(Eigen::VectorXd ratios, Settings settings)
    : c_(std::move(ratios)), settings_(settings) {
    if (c_.size() < 3) throw ArgumentError("need at least 3 ratios");
    if ((c_.array() <= 0.0).any()) throw ArgumentError("ratios must be positive");
    const double sum = c_.sum();
    if (std::abs(sum - 1.0) > 1e-12) throw ArgumentError("ratios must sum to 1");
}

double DysonSolver::residual_inf(Complex z, const Eigen::VectorXcd& u) const {
    const Complex total = u.sum();
    double r = 0.0;
    for (Eigen::Index j = 0; j < u.size(); ++j) {
        if (u[j] == Complex(0.0, 0.0)) return std::numeric_limits<double>::infinity();
        r = std::max(r, std::abs(c_[j] / u[j] + z + (total - u[j])));
    }
    return r;
}

// Convergence targets scale with the solution magnitude: near a point mass
// |g| blows up and the absolute residual cannot beat |g| * machine epsilon.
namespace {
double scaled(double tol, const Eigen::VectorXcd& u) {
    return tol * std::max(1.0, u.cwiseAbs().maxCoeff());
}
} // namespace

// Damped iteration u <- (1 - lambda) u + lambda Psi(u), Psi(u) = -c / (z + S u).
// Psi preserves the upper half-plane, so every iterate stays admissible.
double DysonSolver::fixed_point(Complex z, Eigen::VectorXcd& u, double target, int budget) const {
    const Eigen::Index d = u.size();
    double lambda = settings_.damping;
    double res = residual_inf(z, u);
    Eigen::VectorXcd psi(d), v(d);
    for (int it = 0; it < budget && res > scaled(target, u); ++it) {
        const Complex total = u.sum();
        for (Eigen::Index j = 0; j < d; ++j) psi[j] = -c_[j] / (z + (total - u[j]));
        v = (1.0 - lambda) * u + lambda * psi;
        const double res_v = residual_inf(z, v);
        if (res_v <= res || lambda <= 1e-4) {
            u.swap(v);
            res = res_v;
            lambda = std::min(1.0, lambda * 1.25);
        } else {
            lambda *= 0.5;
        }
    }
    return res;
}

// Damped Newton (Levenberg-Marquardt) on F(u) = c + u o (z + S u). The
// Jacobian equals diag(-c/u) B(z) at the solution; B(z) is invertible on C+
// but degenerates toward the real axis, so the mu-damping keeps steps usable
// where pure Newton would thrash.
bool DysonSolver::newton_polish(Complex z, Eigen::VectorXcd& u, double tol, int budget) const {
    const Eigen::Index d = u.size();
    auto poly_residual = [&](const Eigen::VectorXcd& v, Eigen::VectorXcd& f) {
        const Complex total = v.sum();
        for (Eigen::Index j = 0; j < d; ++j) f[j] = c_[j] + v[j] * (z + (total - v[j]));
        return f.norm();
    };

    Eigen::VectorXcd f(d), f_trial(d), step(d), trial(d);
    double fnorm = poly_residual(u, f);
    double mu = 0.0;
    Eigen::MatrixXcd jac(d, d);
    for (int it = 0; it < budget && residual_inf(z, u) > scaled(tol, u); ++it) {
        const Complex total = u.sum();
        double jac_scale = 0.0;
        for (Eigen::Index j = 0; j < d; ++j) {
            const Complex sj = total - u[j];
            for (Eigen::Index k = 0; k < d; ++k) jac(j, k) = (j == k) ? (z + sj) : u[j];
            jac_scale = std::max(jac_scale, std::abs(z + sj));
        }
        for (Eigen::Index j = 0; j < d; ++j) jac(j, j) += mu;
        step = jac.partialPivLu().solve(-f);
        double scale = 1.0;
        bool accepted = false;
        for (int h = 0; h < 20; ++h, scale *= 0.5) {
            trial = u + scale * step;
            if (min_imag(trial) <= 0.0) continue;
            const double fn_t = poly_residual(trial, f_trial);
            if (fn_t < fnorm) {
                u.swap(trial);
                f.swap(f_trial);
                fnorm = fn_t;
                accepted = true;
                break;
            }
        }
        if (accepted) {
            mu *= 0.25;
            if (mu < 1e-14 * jac_scale) mu = 0.0;
        } else {
            const double floor = std::max(jac_scale, 1.0) * 1e-10;
            mu = (mu == 0.0) ? floor : mu * 100.0;
            if (mu > 1e6 * std::max(jac_scale, 1.0)) break;
        }
    }
    return residual_inf(z, u) <= scaled(tol, u);
}

Eigen::VectorXcd DysonSolver::solve_upper(Complex z, double tol) const {
    const Eigen::Index d = c_.size();
    const double eta_target = z.imag();

    // eta continuation: start high where the fixed point contracts quickly,
    // then walk down with Newton warm starts, shrinking the step whenever a
    // rung fails (the solution steepens near the real axis)
    double eta = std::max(0.5, eta_target);
    Complex zc(z.real(), eta);
    Eigen::VectorXcd u(d);
    for (Eigen::Index j = 0; j < d; ++j) u[j] = -c_[j] / zc;
    fixed_point(zc, u, std::max(1e-3, tol), settings_.max_iter);
    if (!newton_polish(zc, u, tol, 200))
        throw SolverError("Dyson solve failed at the continuation start", residual_inf(zc, u));

    int attempts = 0;
    while (eta > eta_target) {
        double next = std::max(eta_target, 0.5 * eta);
        Eigen::VectorXcd candidate = u;
        while (!newton_polish(Complex(z.real(), next), candidate, tol, 200)) {
            if (++attempts > 400)
                throw SolverError("Dyson continuation stalled at z = (" + std::to_string(z.real()) +
                                      ", " + std::to_string(next) + "i)",
                                  residual_inf(Complex(z.real(), next), candidate));
            next = std::sqrt(eta * next); // geometric midpoint toward the last good rung
            candidate = u;
        }
        u.swap(candidate);
        eta = next;
    }
    return u;
}

Eigen::VectorXcd DysonSolver::solve(Complex z, double tol) const {
    if (tol < 0.0) {
        tol = settings_.tol;
    } else if (tol == 0.0 || tol > 1e-6) {
        throw ArgumentError("tol must lie in (0, 1e-6]");
    }
    if (z.imag() == 0.0) throw ArgumentError("Dyson evaluation requires Im z != 0");
    if (z.imag() > 0.0) return solve_upper(z, tol);
    return solve_upper(std::conj(z), tol).conjugate();
}

std::complex<double> DysonSolver::stieltjes(Complex z) const { return solve(z).sum(); }

double DysonSolver::density(double E, double eta) const {
    if (eta <= 0.0) throw ArgumentError("density requires eta > 0");
    return solve(Complex(E, eta)).sum().imag() / std::numbers::pi;
}

double DysonSolver::spectral_bound() const {
    return 2.0 * (mode_count() - 1) * c_.array().sqrt().sum();
}

bool DysonSolver::has_point_mass() const { return c_.maxCoeff() >= 0.5; }

double DysonSolver::support_edge() const {
    std::call_once(edge_once_, [this] {
        const double eta = settings_.edge_eta;
        const double thr = settings_.edge_threshold;
        double lo = 0.0;
        double hi = 2.0 * std::sqrt(static_cast<double>(mode_count() - 1)) + 0.1;
        if (density(lo, eta) <= thr || density(hi, eta) > thr)
            throw NumericalError("support edge bisection bracket failure");
        while (hi - lo > 1e-7) {
            const double mid = 0.5 * (lo + hi);
            (density(mid, eta) > thr ? lo : hi) = mid;
        }
        edge_ = 0.5 * (lo + hi);
    });
    return edge_;
}

double DysonSolver::moment_at_eta(int k, double eta, double edge) const {
    // substitution x = edge * sin(theta) removes the square-root edge behavior
    static const GaussLegendreRule rule = gauss_legendre(160);
    const double half_pi = std::numbers::pi / 2.0;
    std::vector<double> terms(static_cast<std::size_t>(rule.nodes.size()));
    for (Eigen::Index i = 0; i < rule.nodes.size(); ++i) {
        const double theta = half_pi * rule.nodes[i];
        const double x = edge * std::sin(theta);
        const double jac = edge * std::cos(theta) * half_pi;
        terms[static_cast<std::size_t>(i)] =
            rule.weights[i] * jac * std::pow(x, k) * density(x, eta);
    }
    return pairwise_sum(terms);
}

double DysonSolver::moment(int k) const {
    if (k < 0 || k % 2 != 0) throw ArgumentError("moment requires even k >= 0 (odd moments vanish)");
    {
        std::lock_guard<std::mutex> lock(moment_mutex_);
        auto it = moment_cache_.find(k);
        if (it != moment_cache_.end()) return it->second;
    }
    const double edge = support_edge();
    const double eta = settings_.edge_eta;
    const double coarse = moment_at_eta(k, eta, edge);
    const double fine = moment_at_eta(k, eta / 2.0, edge);
    const double value = 2.0 * fine - coarse; // Richardson step in eta
    {
        std::lock_guard<std::mutex> lock(moment_mutex_);
        moment_cache_[k] = value;
    }
    return value;
}

} // namespace tct
