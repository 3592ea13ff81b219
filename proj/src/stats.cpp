#include "tct/stats.hpp"

#include <algorithm>
#include <cmath>

#include "tct/errors.hpp"
#include "tct/quadrature.hpp"

namespace tct {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double normal_quantile(double p) {
    if (p <= 0.0 || p >= 1.0) throw ArgumentError("quantile requires p in (0,1)");
    double lo = -40.0, hi = 40.0;
    // bisection on the CDF; 200 halvings take the bracket far below double ulp
    for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
        const double mid = 0.5 * (lo + hi);
        (normal_cdf(mid) < p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

double ks_distance_normal(std::vector<double> values) {
    if (values.empty()) throw ArgumentError("KS distance of an empty sample");
    std::sort(values.begin(), values.end());
    const double n = static_cast<double>(values.size());
    double d = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double cdf = normal_cdf(values[i]);
        d = std::max(d, std::abs(cdf - static_cast<double>(i) / n));
        d = std::max(d, std::abs(static_cast<double>(i + 1) / n - cdf));
    }
    return d;
}

Summary summarize(const std::vector<double>& values) {
    if (values.size() < 2) throw ArgumentError("summary requires at least two values");
    const double n = static_cast<double>(values.size());
    const double mean = pairwise_sum(values) / n;
    std::vector<double> sq(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double dlt = values[i] - mean;
        sq[i] = dlt * dlt;
    }
    const double var = pairwise_sum(sq) / (n - 1.0);
    Summary s;
    s.mean = mean;
    s.variance = var;
    s.mean_se = std::sqrt(var / n);
    s.variance_se = var * std::sqrt(2.0 / (n - 1.0));
    return s;
}

} // namespace tct
