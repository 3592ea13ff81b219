#ifndef TCT_HARNESS_HPP
#define TCT_HARNESS_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "tct/limit_laws.hpp"
#include "tct/tensor.hpp"

namespace tct {

struct ExperimentConfig {
    std::string kind = "table1"; // table1 | power | matching | qq | spectrum
    std::vector<int> dims = {100, 100, 100};
    NoiseDist dist = NoiseDist::Gaussian;
    std::string vector_mode = "delocalized"; // delocalized | localized | file
    std::string vectors_file;
    std::string f_name = "x2";
    int reps = 100;
    double alpha = 0.05;
    std::vector<double> betas = {0.0, 0.2, 0.4, 0.6, 0.8, 1.0, 1.2};
    std::vector<double> beta0s = {2.0, 2.5, 3.0};
    std::vector<double> beta1s = {0.0, 0.4, 0.8, 1.2};
    std::uint64_t seed = 20240901ULL;
    std::string output; // empty = stdout
    int threads = 0;    // 0 = hardware concurrency
    int bins = 50;
    Convention convention = Convention::MainTextD3;

    DimensionProfile profile() const { return DimensionProfile(dims); }
    UnitVectorSet vectors() const;
    void validate() const;
};

// flat key=value file; '#' starts a comment
ExperimentConfig load_config(std::istream& is);
ExperimentConfig load_config_file(const std::string& path);

// Table rows: f, dist, vector_type, empirical_mean, empirical_var, limit_mean, limit_var
void run_table1(const ExperimentConfig& config, std::ostream& out);
// rows: beta, empirical_power, theoretical_power
void run_power(const ExperimentConfig& config, std::ostream& out);
// rows: beta0, beta1, empirical_power_known, empirical_power_estimated
void run_matching(const ExperimentConfig& config, std::ostream& out);
// rows: index, normal_quantile, normalized_value
void run_qq(const ExperimentConfig& config, std::ostream& out);
// histogram rows: bin_lo, bin_hi, empirical_density, lsd_density
void run_spectrum(const ExperimentConfig& config, std::ostream& out,
                  std::ostream* eigenvalues_out = nullptr);

void run_experiment(const ExperimentConfig& config, std::ostream& out);

} // namespace tct

#endif
