#ifndef TCT_TENSOR_HPP
#define TCT_TENSOR_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "tct/errors.hpp"

namespace tct {

// Mode-count and per-mode sizes of a d-fold tensor, with the derived
// totals used throughout: N = sum(n_j) and ratios c_j = n_j / N.
class DimensionProfile {
public:
    explicit DimensionProfile(std::vector<int> dims);

    int mode_count() const { return static_cast<int>(dims_.size()); }
    const std::vector<int>& dims() const { return dims_; }
    int dim(int mode) const { return dims_[static_cast<std::size_t>(mode)]; }
    std::int64_t total_dim() const { return total_; }        // N
    std::int64_t element_count() const { return elements_; } // prod(n_j)
    const Eigen::VectorXd& ratios() const { return ratios_; }
    double ratio(int mode) const { return ratios_[mode]; }
    // byte offset of mode j's block inside the N x N contracted matrix
    int block_offset(int mode) const { return offsets_[static_cast<std::size_t>(mode)]; }
    const std::vector<std::int64_t>& strides() const { return strides_; }

    bool operator==(const DimensionProfile& o) const { return dims_ == o.dims_; }
    bool operator!=(const DimensionProfile& o) const { return !(*this == o); }

private:
    std::vector<int> dims_;
    std::vector<std::int64_t> strides_; // row-major, last index fastest
    std::vector<int> offsets_;
    std::int64_t total_ = 0;
    std::int64_t elements_ = 0;
    Eigen::VectorXd ratios_;
};

// Dense d-fold tensor, flat row-major storage.
class DenseTensor {
public:
    explicit DenseTensor(DimensionProfile profile);
    DenseTensor(DimensionProfile profile, Eigen::VectorXd values);

    const DimensionProfile& profile() const { return profile_; }
    const Eigen::VectorXd& values() const { return values_; }
    Eigen::VectorXd& values() { return values_; }
    double operator()(const std::vector<int>& index) const;

private:
    DimensionProfile profile_;
    Eigen::VectorXd values_;
};

// d unit vectors, one per mode.
class UnitVectorSet {
public:
    UnitVectorSet(DimensionProfile profile, std::vector<Eigen::VectorXd> vectors);

    const DimensionProfile& profile() const { return profile_; }
    const Eigen::VectorXd& vector(int mode) const { return vectors_[static_cast<std::size_t>(mode)]; }
    const std::vector<Eigen::VectorXd>& vectors() const { return vectors_; }

private:
    DimensionProfile profile_;
    std::vector<Eigen::VectorXd> vectors_;
};

enum class NoiseDist { Gaussian, UniformPmSqrt3 };

NoiseDist parse_noise_dist(const std::string& name);
std::string to_string(NoiseDist dist);

// Rank-R spiked model: T = sum_r beta_r x^(r,1) (x) ... (x) x^(r,d) + X / sqrt(N).
// Signal sets are re-orthonormalized per mode by modified Gram-Schmidt.
class SpikedModel {
public:
    SpikedModel(DimensionProfile profile,
                std::vector<double> betas,
                std::vector<UnitVectorSet> signals,
                NoiseDist noise_dist);

    const DimensionProfile& profile() const { return profile_; }
    int rank() const { return static_cast<int>(betas_.size()); }
    double beta(int r) const { return betas_[static_cast<std::size_t>(r)]; }
    const UnitVectorSet& signal(int r) const { return signals_[static_cast<std::size_t>(r)]; }
    NoiseDist noise_dist() const { return noise_dist_; }

private:
    DimensionProfile profile_;
    std::vector<double> betas_;
    std::vector<UnitVectorSet> signals_;
    NoiseDist noise_dist_;
};

// Direction-vector statistics entering the CLT mean and covariance:
//   b1_k = N^{-1/2} sum_i a^(k)_i,
//   B4(k,l) = prod_{j != k,l} sum_i (a^(j)_i)^4,
//   B3(k,l,t) = prod_{j != k,l,t} sum_i (a^(j)_i)^3.
class VectorStats {
public:
    explicit VectorStats(const UnitVectorSet& vectors);

    // idealized delocalized limit: all b1/B4/B3 contributions zero
    static VectorStats delocalized_limit(int d);

    int mode_count() const { return d_; }
    double b1(int k) const { return b1_[k]; }
    const Eigen::VectorXd& b1() const { return b1_; }
    double b4(int k, int l) const { return b4_(k, l); }
    const Eigen::MatrixXd& b4() const { return b4_; }
    double b3(int k, int l, int t) const { return b3_[static_cast<std::size_t>((k * d_ + l) * d_ + t)]; }

private:
    VectorStats() = default;
    int d_ = 0;
    Eigen::VectorXd b1_;
    Eigen::MatrixXd b4_;
    std::vector<double> b3_;
};

// iid noise tensor, mean 0, variance 1; deterministic given seed.
DenseTensor generate_noise(const DimensionProfile& profile, NoiseDist dist, std::uint64_t seed);

// T = sum_r beta_r prod_l x^(r,l) + noise / sqrt(N)
DenseTensor assemble_spiked(const SpikedModel& model, const DenseTensor& noise);

VectorStats vector_stats(const UnitVectorSet& vectors);

// canonical direction choices used by the experiments
UnitVectorSet delocalized_vectors(const DimensionProfile& profile);
UnitVectorSet localized_vectors(const DimensionProfile& profile);

// modified Gram-Schmidt across the R vectors of each mode
std::vector<UnitVectorSet> orthonormalize_signals(const DimensionProfile& profile,
                                                  std::vector<UnitVectorSet> signals);

// Tensor file I/O. Text: "dims: n1 ... nd" then whitespace-separated values in
// row-major order. Binary: magic "TNSR", u32 d, u64 dims[], little-endian f64.
void write_tensor_text(std::ostream& os, const DenseTensor& t);
DenseTensor read_tensor_text(std::istream& is);
void write_tensor_binary(std::ostream& os, const DenseTensor& t);
DenseTensor read_tensor_binary(std::istream& is);
void save_tensor(const std::string& path, const DenseTensor& t, bool binary = false);
DenseTensor load_tensor(const std::string& path);

// Vector-set file: "dims: n1 ... nd" then one line of n_j values per mode.
void write_vectors_text(std::ostream& os, const UnitVectorSet& v);
UnitVectorSet read_vectors_text(std::istream& is);
void save_vectors(const std::string& path, const UnitVectorSet& v);
UnitVectorSet load_vectors(const std::string& path);

} // namespace tct

#endif
