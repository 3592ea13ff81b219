#ifndef TCT_STATS_HPP
#define TCT_STATS_HPP

#include <vector>

namespace tct {

double normal_cdf(double x);
// upper-quantile companion: normal_quantile(1 - alpha) = z_alpha
double normal_quantile(double p);

// Kolmogorov-Smirnov distance of a sample against the standard normal
double ks_distance_normal(std::vector<double> values);

struct Summary {
    double mean;
    double variance; // unbiased
    double mean_se;
    double variance_se;
};
Summary summarize(const std::vector<double>& values);

} // namespace tct

#endif
