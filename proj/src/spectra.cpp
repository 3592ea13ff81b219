#include "tct/spectra.hpp"

#include <algorithm>
#include <cmath>

namespace tct {

namespace {
double off_diagonal_norm_sq(const Eigen::MatrixXd& a) {
    double s = 0.0;
    for (Eigen::Index j = 0; j < a.cols(); ++j)
        for (Eigen::Index i = 0; i < j; ++i) s += a(i, j) * a(i, j);
    return 2.0 * s;
}
} // namespace

Spectrum symmetric_eigenvalues(const Eigen::MatrixXd& m, double tol) {
    const Eigen::Index n = m.rows();
    if (m.cols() != n) throw ArgumentError("matrix must be square");
    const double scale = m.cwiseAbs().maxCoeff();
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(scale, 1.0))
        throw ArgumentError("matrix is not symmetric");

    Eigen::MatrixXd a = m;
    const double fro = a.norm();
    if (fro == 0.0) {
        Spectrum s;
        s.eigenvalues = Eigen::VectorXd::Zero(n);
        return s;
    }
    const double threshold_sq = (tol * fro) * (tol * fro);

    constexpr int kMaxSweeps = 60;
    int sweep = 0;
    while (off_diagonal_norm_sq(a) > threshold_sq) {
        if (++sweep > kMaxSweeps) throw NumericalError("Jacobi sweep cap reached");
        for (Eigen::Index p = 0; p < n - 1; ++p) {
            for (Eigen::Index q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                const double tau = s / (1.0 + c);

                const double app = a(p, p), aqq = a(q, q);
                a(p, p) = app - t * apq;
                a(q, q) = aqq + t * apq;
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                // rotate the remaining entries of rows/columns p and q
                double* colp = a.col(p).data();
                double* colq = a.col(q).data();
                for (Eigen::Index r = 0; r < n; ++r) {
                    if (r == p || r == q) continue;
                    const double arp = colp[r], arq = colq[r];
                    colp[r] = arp - s * (arq + tau * arp);
                    colq[r] = arq + s * (arp - tau * arq);
                    a(p, r) = colp[r];
                    a(q, r) = colq[r];
                }
            }
        }
    }

    Spectrum out;
    out.eigenvalues = a.diagonal();
    std::sort(out.eigenvalues.data(), out.eigenvalues.data() + n);
    return out;
}

double empirical_lss(const Spectrum& spectrum, const std::function<double(double)>& f) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < spectrum.count(); ++i) s += f(spectrum.eigenvalues[i]);
    return s;
}

double g_n_statistic(const Spectrum& spectrum, const std::function<double(double)>& f,
                     double f_integral) {
    return empirical_lss(spectrum, f) - static_cast<double>(spectrum.count()) * f_integral;
}

} // namespace tct
