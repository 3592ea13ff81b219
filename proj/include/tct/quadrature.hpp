#ifndef TCT_QUADRATURE_HPP
#define TCT_QUADRATURE_HPP

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <vector>

namespace tct {

struct GaussLegendreRule {
    Eigen::VectorXd nodes;   // on [-1, 1]
    Eigen::VectorXd weights;
};

// Nodes by Newton iteration on P_n; accurate to machine precision for the
// orders used here (n <= a few hundred).
inline GaussLegendreRule gauss_legendre(int n) {
    GaussLegendreRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    return rule;
}

// Fixed-order pairwise summation so results do not depend on how work was
// scheduled across threads.
template <typename T>
T pairwise_sum(const std::vector<T>& v, std::size_t lo, std::size_t hi) {
    const std::size_t n = hi - lo;
    if (n == 0) return T{};
    if (n == 1) return v[lo];
    if (n == 2) return v[lo] + v[lo + 1];
    const std::size_t mid = lo + n / 2;
    return pairwise_sum(v, lo, mid) + pairwise_sum(v, mid, hi);
}

template <typename T>
T pairwise_sum(const std::vector<T>& v) {
    return pairwise_sum(v, 0, v.size());
}

} // namespace tct

#endif
