#include "tct/limit_laws.hpp"

#include <cmath>

namespace tct {

namespace {
using Complex = std::complex<double>;
}

LimitContext::LimitContext(const DysonSolver& solver, VectorStats stats, double kappa3,
                           double kappa4, Convention convention)
    : solver_(&solver),
      stats_(std::move(stats)),
      d_(solver.mode_count()),
      kappa3_(kappa3),
      kappa4_(kappa4),
      convention_(convention) {
    if (stats_.mode_count() != d_)
        throw DimensionError("vector stats mode count does not match solver");
    if (kappa4_ < -2.0)
        throw ArgumentError("kappa4 < -2 is impossible for unit-variance noise");
    if (convention_ == Convention::MainTextD3 && d_ != 3)
        throw ArgumentError("the d=3 main-text convention requires d == 3");
    inv_c_ = solver.ratios().array().inverse();
}

GValue LimitContext::eval(Complex z) const {
    GValue v;
    v.z = z;
    v.g = solver_->solve(z);
    v.sum = v.g.sum();
    return v;
}

Eigen::MatrixXcd LimitContext::gamma_matrix(const GValue& gz) const {
    const Complex g = gz.sum;
    const Complex z = gz.z;
    Eigen::MatrixXcd gamma(d_, d_);
    // (z+g)I - diag(g) + g S - diag(g) S - S diag(g), with S = 11' - I
    for (int j = 0; j < d_; ++j)
        for (int k = 0; k < d_; ++k) {
            if (j == k) {
                gamma(j, k) = z + g - gz.g[j];
            } else {
                gamma(j, k) = g - gz.g[j] - gz.g[k];
            }
        }
    return gamma;
}

Eigen::MatrixXcd LimitContext::w_matrix(const GValue& gz) const {
    Eigen::MatrixXcd gamma = gamma_matrix(gz);
    Eigen::MatrixXcd w = gamma.partialPivLu().solve(-Eigen::MatrixXcd::Identity(d_, d_));
    const double res = (gamma * w + Eigen::MatrixXcd::Identity(d_, d_)).cwiseAbs().maxCoeff();
    if (!(res < 1e-8))
        throw SingularityError("Gamma(z) numerically singular at z = (" + std::to_string(gz.z.real()) +
                               ", " + std::to_string(gz.z.imag()) + "i)");
    return w;
}

Eigen::MatrixXcd LimitContext::pi_matrix(const GValue& g1, const GValue& g2) const {
    Eigen::MatrixXcd pi = Eigen::MatrixXcd::Identity(d_, d_);
    for (int j = 0; j < d_; ++j) {
        const Complex w = inv_c_[j] * g1.g[j] * g2.g[j];
        for (int k = 0; k < d_; ++k)
            if (k != j) pi(j, k) -= w;
    }
    return pi;
}

Eigen::MatrixXcd LimitContext::v_matrix(const GValue& g1, const GValue& g2) const {
    Eigen::VectorXcd diag(d_);
    for (int j = 0; j < d_; ++j) diag[j] = inv_c_[j] * g1.g[j] * g2.g[j];
    return pi_matrix(g1, g2).partialPivLu().solve(Eigen::MatrixXcd(diag.asDiagonal()));
}

Eigen::MatrixXcd LimitContext::script_v(const GValue& g1, const GValue& g2) const {
    const Eigen::MatrixXcd v12 = v_matrix(g1, g2);
    const Eigen::MatrixXcd v22 = v_matrix(g2, g2);
    Eigen::PartialPivLU<Eigen::MatrixXcd> pi_lu(pi_matrix(g1, g2));

    Eigen::VectorXcd cg1(d_);
    for (int j = 0; j < d_; ++j) cg1[j] = inv_c_[j] * g1.g[j];

    Eigen::MatrixXcd script = Eigen::MatrixXcd::Zero(d_, d_);
    Eigen::MatrixXcd inner(d_, d_);
    for (int r = 0; r < d_; ++r) {
        // diag(S V_{.r}): entry s is the column sum of V_{.r} minus V_{sr}
        const Complex colsum = v12.col(r).sum();
        inner.setZero();
        for (int s = 0; s < d_; ++s) inner(s, s) = v22(s, s);
        for (int s = 0; s < d_; ++s) {
            const Complex f = colsum - v12(s, r);
            inner.row(s) += f * v12.row(s);
        }
        for (int s = 0; s < d_; ++s) inner.row(s) *= cg1[s];
        const Eigen::MatrixXcd vt = pi_lu.solve(inner); // Vtilde_r
        for (int s = 0; s < d_; ++s)
            if (s != r) script.row(s) += vt.row(s);
    }
    return script;
}

Eigen::MatrixXcd LimitContext::u_matrix(const GValue& g1, const GValue& g2) const {
    const bool general = (convention_ == Convention::GeneralD);
    // ring V: diag(c^{-1} o g(z1)) V(z1,z2)   [d=3 main text]
    //         diag(c^{-1} o g(z1)) V(z2,z2)   [general-d form]
    const Eigen::MatrixXcd v = general ? v_matrix(g2, g2) : v_matrix(g1, g2);
    Eigen::MatrixXcd ring(d_, d_);
    for (int s = 0; s < d_; ++s) ring.row(s) = inv_c_[s] * g1.g[s] * v.row(s);

    Eigen::VectorXcd prod(d_); // c_l^{-1} g_l(z1) g_l(z2)  (or conj(g_l(z2)))
    for (int l = 0; l < d_; ++l) {
        const Complex gl2 = general ? std::conj(g2.g[l]) : g2.g[l];
        prod[l] = inv_c_[l] * g1.g[l] * gl2;
    }

    const Eigen::MatrixXd& b4 = stats_.b4();
    Eigen::MatrixXcd u(d_, d_);
    for (int s = 0; s < d_; ++s) {
        Complex row_factor(0.0, 0.0);
        for (int l = 0; l < d_; ++l)
            if (l != s) row_factor += b4(s, l) * prod[l];
        for (int t = 0; t < d_; ++t) {
            Complex first(0.0, 0.0);
            for (int l = 0; l < d_; ++l)
                if (l != s) first += b4(s, l) * ring(l, t);
            u(s, t) = prod[s] * first + ring(s, t) * row_factor;
        }
    }
    return u;
}

Eigen::VectorXcd LimitContext::mean_vector(const GValue& gz) const {
    const Eigen::MatrixXcd w = w_matrix(gz);
    const Eigen::MatrixXcd v = v_matrix(gz, gz);
    const Complex g = gz.sum;

    Eigen::VectorXcd m = Eigen::VectorXcd::Zero(d_);
    for (int i = 0; i < d_; ++i) {
        Complex acc(0.0, 0.0);
        for (int r = 0; r < d_; ++r) {
            if (r == i) continue;
            for (int wk = 0; wk < d_; ++wk) {
                if (wk == i || wk == r) continue;
                acc += w(r, wk);
            }
        }
        m[i] = gz.g[i] * acc;
        for (int l = 0; l < d_; ++l) {
            if (l == i) continue;
            m[i] += (g - gz.g[i] - gz.g[l]) * w(i, l) + v(i, l);
        }
    }

    if (kappa3_ != 0.0) {
        if (convention_ == Convention::MainTextD3) {
            Complex term = -2.0 * kappa3_;
            for (int j = 0; j < 3; ++j) term *= inv_c_[j] * gz.g[j] * stats_.b1(j);
            m.array() += term;
        } else {
            for (int i = 0; i < d_; ++i) {
                Complex acc(0.0, 0.0);
                for (int l = 0; l < d_; ++l) {
                    if (l == i) continue;
                    for (int t = 0; t < d_; ++t) {
                        if (t == i || t == l) continue;
                        acc += stats_.b3(i, l, t) * (inv_c_[i] * gz.g[i] * stats_.b1(i)) *
                               (inv_c_[l] * gz.g[l] * stats_.b1(l)) *
                               (inv_c_[t] * gz.g[t] * stats_.b1(t));
                    }
                }
                m[i] += -2.0 * kappa3_ * acc;
            }
        }
    }

    if (kappa4_ != 0.0) {
        const Eigen::MatrixXd& b4 = stats_.b4();
        for (int i = 0; i < d_; ++i) {
            Complex acc(0.0, 0.0);
            for (int l = 0; l < d_; ++l) {
                if (l == i) continue;
                acc += b4(i, l) * inv_c_[l] * gz.g[l] * gz.g[l];
            }
            m[i] += kappa4_ * inv_c_[i] * gz.g[i] * gz.g[i] * acc;
        }
    }
    return m;
}

std::complex<double> LimitContext::mu_function(const GValue& gz) const {
    const Eigen::VectorXcd m = mean_vector(gz);
    Eigen::VectorXcd scaled(d_);
    for (int j = 0; j < d_; ++j) scaled[j] = inv_c_[j] * gz.g[j] * m[j];
    const Eigen::VectorXcd solved = pi_matrix(gz, gz).partialPivLu().solve(scaled);
    return solved.sum();
}

std::complex<double> LimitContext::cov_function(const GValue& g1, const GValue& g2) const {
    Eigen::MatrixXcd f = 2.0 * script_v(g1, g2);
    if (kappa4_ != 0.0) f += kappa4_ * u_matrix(g1, g2);
    Eigen::VectorXcd rhs = f.rowwise().sum();
    for (int j = 0; j < d_; ++j) rhs[j] *= inv_c_[j] * g1.g[j];
    return pi_matrix(g1, g2).partialPivLu().solve(rhs).sum();
}

std::complex<double> LimitContext::entrywise_prediction(const GValue& gz, int s, int t, int i_s,
                                                        int i_t, const UnitVectorSet& vectors) const {
    if (s < 0 || s >= d_ || t < 0 || t >= d_) throw ArgumentError("mode indices out of range");
    const Eigen::MatrixXcd w = w_matrix(gz);
    const Complex g = gz.sum;
    Complex bracket(0.0, 0.0);
    if (s == t && i_s == i_t) bracket += 1.0;
    const double a = vectors.vector(s)[i_s];
    Complex corr(0.0, 0.0);
    for (int k = 0; k < d_; ++k) {
        if (k == s) continue;
        corr += (g - gz.g[s] - gz.g[k]) * w(s, k);
    }
    bracket += a * a * corr;
    return inv_c_[s] * gz.g[s] * bracket;
}

} // namespace tct
