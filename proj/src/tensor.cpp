#include "tct/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "tct/rng.hpp"

namespace tct {

namespace {
constexpr std::int64_t kMaxElements = 100'000'000; // memory budget on prod(n_j)
constexpr double kUnitNormTol = 1e-12;
constexpr double kOrthoTol = 1e-10;
} // namespace

DimensionProfile::DimensionProfile(std::vector<int> dims) : dims_(std::move(dims)) {
    const int d = static_cast<int>(dims_.size());
    if (d < 3) throw DimensionError("mode count must be at least 3, got " + std::to_string(d));
    elements_ = 1;
    total_ = 0;
    for (int n : dims_) {
        if (n < 1) throw DimensionError("every mode size must be >= 1");
        if (elements_ > kMaxElements / n)
            throw DimensionError("tensor exceeds element budget of 1e8");
        elements_ *= n;
        total_ += n;
    }
    strides_.assign(static_cast<std::size_t>(d), 1);
    for (int j = d - 2; j >= 0; --j)
        strides_[static_cast<std::size_t>(j)] =
            strides_[static_cast<std::size_t>(j + 1)] * dims_[static_cast<std::size_t>(j + 1)];
    offsets_.assign(static_cast<std::size_t>(d), 0);
    for (int j = 1; j < d; ++j)
        offsets_[static_cast<std::size_t>(j)] =
            offsets_[static_cast<std::size_t>(j - 1)] + dims_[static_cast<std::size_t>(j - 1)];
    ratios_.resize(d);
    for (int j = 0; j < d; ++j) ratios_[j] = static_cast<double>(dims_[static_cast<std::size_t>(j)]) / static_cast<double>(total_);
}

DenseTensor::DenseTensor(DimensionProfile profile)
    : profile_(std::move(profile)), values_(Eigen::VectorXd::Zero(profile_.element_count())) {}

DenseTensor::DenseTensor(DimensionProfile profile, Eigen::VectorXd values)
    : profile_(std::move(profile)), values_(std::move(values)) {
    if (values_.size() != profile_.element_count())
        throw DimensionError("value count does not match dimension profile");
}

double DenseTensor::operator()(const std::vector<int>& index) const {
    std::int64_t flat = 0;
    for (int j = 0; j < profile_.mode_count(); ++j)
        flat += index[static_cast<std::size_t>(j)] * profile_.strides()[static_cast<std::size_t>(j)];
    return values_[flat];
}

UnitVectorSet::UnitVectorSet(DimensionProfile profile, std::vector<Eigen::VectorXd> vectors)
    : profile_(std::move(profile)), vectors_(std::move(vectors)) {
    if (static_cast<int>(vectors_.size()) != profile_.mode_count())
        throw DimensionError("need one direction vector per mode");
    for (int j = 0; j < profile_.mode_count(); ++j) {
        const auto& v = vectors_[static_cast<std::size_t>(j)];
        if (v.size() != profile_.dim(j))
            throw DimensionError("direction vector length mismatch in mode " + std::to_string(j));
        if (std::abs(v.norm() - 1.0) > kUnitNormTol)
            throw ArgumentError("direction vector in mode " + std::to_string(j) + " is not unit norm");
    }
}

NoiseDist parse_noise_dist(const std::string& name) {
    if (name == "gaussian") return NoiseDist::Gaussian;
    if (name == "uniform_pm_sqrt3" || name == "uniform") return NoiseDist::UniformPmSqrt3;
    throw ConfigError("unknown noise distribution '" + name + "' (expected gaussian or uniform_pm_sqrt3)");
}

std::string to_string(NoiseDist dist) {
    return dist == NoiseDist::Gaussian ? "gaussian" : "uniform_pm_sqrt3";
}

SpikedModel::SpikedModel(DimensionProfile profile,
                         std::vector<double> betas,
                         std::vector<UnitVectorSet> signals,
                         NoiseDist noise_dist)
    : profile_(std::move(profile)),
      betas_(std::move(betas)),
      signals_(orthonormalize_signals(profile_, std::move(signals))),
      noise_dist_(noise_dist) {
    if (betas_.size() != signals_.size())
        throw ArgumentError("need one signal vector set per beta");
    for (std::size_t r = 0; r + 1 < betas_.size(); ++r)
        if (betas_[r] < betas_[r + 1])
            throw ArgumentError("betas must be nonincreasing");
    for (double b : betas_)
        if (b <= 0.0) throw ArgumentError("betas must be positive");
    // per-mode orthonormality across components
    const int d = profile_.mode_count();
    for (int l = 0; l < d; ++l)
        for (std::size_t r1 = 0; r1 < signals_.size(); ++r1)
            for (std::size_t r2 = 0; r2 < r1; ++r2)
                if (std::abs(signals_[r1].vector(l).dot(signals_[r2].vector(l))) > kOrthoTol)
                    throw ArgumentError("signal vectors are not orthogonal in mode " + std::to_string(l));
}

std::vector<UnitVectorSet> orthonormalize_signals(const DimensionProfile& profile,
                                                  std::vector<UnitVectorSet> signals) {
    const int d = profile.mode_count();
    const std::size_t R = signals.size();
    std::vector<std::vector<Eigen::VectorXd>> cols(static_cast<std::size_t>(d));
    for (int l = 0; l < d; ++l) {
        auto& mode = cols[static_cast<std::size_t>(l)];
        mode.reserve(R);
        for (std::size_t r = 0; r < R; ++r) {
            Eigen::VectorXd v = signals[r].vector(l);
            for (const auto& u : mode) v -= u.dot(v) * u;
            const double n = v.norm();
            if (n < kUnitNormTol)
                throw ArgumentError("signal vectors are linearly dependent in mode " + std::to_string(l));
            mode.push_back(v / n);
        }
    }
    std::vector<UnitVectorSet> out;
    out.reserve(R);
    for (std::size_t r = 0; r < R; ++r) {
        std::vector<Eigen::VectorXd> vs;
        vs.reserve(static_cast<std::size_t>(d));
        for (int l = 0; l < d; ++l) vs.push_back(cols[static_cast<std::size_t>(l)][r]);
        out.emplace_back(profile, std::move(vs));
    }
    return out;
}

VectorStats::VectorStats(const UnitVectorSet& vectors) {
    d_ = vectors.profile().mode_count();
    const double N = static_cast<double>(vectors.profile().total_dim());
    b1_.resize(d_);
    Eigen::VectorXd s3(d_), s4(d_);
    for (int j = 0; j < d_; ++j) {
        const auto& a = vectors.vector(j);
        b1_[j] = a.sum() / std::sqrt(N);
        s3[j] = a.array().cube().sum();
        s4[j] = a.array().square().square().sum();
    }
    b4_.resize(d_, d_);
    b4_.setZero();
    for (int k = 0; k < d_; ++k)
        for (int l = 0; l < d_; ++l) {
            if (k == l) continue;
            double p = 1.0;
            for (int j = 0; j < d_; ++j)
                if (j != k && j != l) p *= s4[j];
            b4_(k, l) = p;
        }
    b3_.assign(static_cast<std::size_t>(d_) * d_ * d_, 0.0);
    for (int k = 0; k < d_; ++k)
        for (int l = 0; l < d_; ++l)
            for (int t = 0; t < d_; ++t) {
                if (k == l || l == t || k == t) continue;
                double p = 1.0;
                for (int j = 0; j < d_; ++j)
                    if (j != k && j != l && j != t) p *= s3[j];
                b3_[static_cast<std::size_t>((k * d_ + l) * d_ + t)] = p;
            }
}

VectorStats VectorStats::delocalized_limit(int d) {
    VectorStats s;
    s.d_ = d;
    s.b1_ = Eigen::VectorXd::Zero(d);
    s.b4_ = Eigen::MatrixXd::Zero(d, d);
    s.b3_.assign(static_cast<std::size_t>(d) * d * d, 0.0);
    return s;
}

VectorStats vector_stats(const UnitVectorSet& vectors) { return VectorStats(vectors); }

DenseTensor generate_noise(const DimensionProfile& profile, NoiseDist dist, std::uint64_t seed) {
    DenseTensor t(profile);
    Rng rng(derive_seed(seed, "noise", 0));
    auto& v = t.values();
    const std::int64_t n = v.size();
    if (dist == NoiseDist::Gaussian) {
        for (std::int64_t i = 0; i < n; ++i) v[i] = rng.next_gaussian();
    } else {
        for (std::int64_t i = 0; i < n; ++i) v[i] = rng.next_uniform_pm_sqrt3();
    }
    return t;
}

DenseTensor assemble_spiked(const SpikedModel& model, const DenseTensor& noise) {
    if (noise.profile() != model.profile())
        throw DimensionError("noise profile does not match model profile");
    const auto& profile = model.profile();
    const int d = profile.mode_count();
    const double sqrt_n = std::sqrt(static_cast<double>(profile.total_dim()));

    DenseTensor out(profile, noise.values() / sqrt_n);
    auto& v = out.values();

    std::vector<int> idx(static_cast<std::size_t>(d), 0);
    std::vector<double> prefix(static_cast<std::size_t>(d) + 1, 1.0);
    for (int r = 0; r < model.rank(); ++r) {
        const auto& sig = model.signal(r);
        const double beta = model.beta(r);
        std::fill(idx.begin(), idx.end(), 0);
        // odometer over all indices with running prefix products of signal entries
        std::int64_t flat = 0;
        int level = 0;
        while (true) {
            if (level == d) {
                v[flat] += beta * prefix[static_cast<std::size_t>(d)];
                ++flat;
                --level;
                while (level >= 0) {
                    auto li = static_cast<std::size_t>(level);
                    if (++idx[li] < profile.dim(level)) break;
                    idx[li] = 0;
                    --level;
                }
                if (level < 0) break;
            }
            for (; level < d; ++level) {
                auto li = static_cast<std::size_t>(level);
                prefix[li + 1] = prefix[li] * sig.vector(level)[idx[li]];
            }
        }
    }
    return out;
}

UnitVectorSet delocalized_vectors(const DimensionProfile& profile) {
    std::vector<Eigen::VectorXd> vs;
    vs.reserve(static_cast<std::size_t>(profile.mode_count()));
    for (int j = 0; j < profile.mode_count(); ++j)
        vs.push_back(Eigen::VectorXd::Constant(profile.dim(j), 1.0 / std::sqrt(static_cast<double>(profile.dim(j)))));
    return UnitVectorSet(profile, std::move(vs));
}

UnitVectorSet localized_vectors(const DimensionProfile& profile) {
    std::vector<Eigen::VectorXd> vs;
    vs.reserve(static_cast<std::size_t>(profile.mode_count()));
    for (int j = 0; j < profile.mode_count(); ++j)
        vs.push_back(Eigen::VectorXd::Unit(profile.dim(j), 0));
    return UnitVectorSet(profile, std::move(vs));
}

void write_tensor_text(std::ostream& os, const DenseTensor& t) {
    os << "dims:";
    for (int n : t.profile().dims()) os << ' ' << n;
    os << '\n';
    os.precision(17);
    const auto& v = t.values();
    for (std::int64_t i = 0; i < v.size(); ++i) os << v[i] << ((i + 1) % 8 == 0 ? '\n' : ' ');
    os << '\n';
}

namespace {
std::vector<int> read_dims_line(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw ConfigError("empty tensor file");
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag != "dims:") throw ConfigError("tensor file must start with 'dims:'");
    std::vector<int> dims;
    int n;
    while (ls >> n) dims.push_back(n);
    if (dims.empty()) throw ConfigError("no dimensions in tensor file header");
    return dims;
}
} // namespace

DenseTensor read_tensor_text(std::istream& is) {
    DimensionProfile profile(read_dims_line(is));
    Eigen::VectorXd v(profile.element_count());
    for (std::int64_t i = 0; i < v.size(); ++i)
        if (!(is >> v[i])) throw ConfigError("tensor file ended early at element " + std::to_string(i));
    return DenseTensor(std::move(profile), std::move(v));
}

void write_tensor_binary(std::ostream& os, const DenseTensor& t) {
    os.write("TNSR", 4);
    const std::uint32_t d = static_cast<std::uint32_t>(t.profile().mode_count());
    os.write(reinterpret_cast<const char*>(&d), sizeof d);
    for (int n : t.profile().dims()) {
        const std::uint64_t n64 = static_cast<std::uint64_t>(n);
        os.write(reinterpret_cast<const char*>(&n64), sizeof n64);
    }
    os.write(reinterpret_cast<const char*>(t.values().data()),
             static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(t.values().size())));
}

DenseTensor read_tensor_binary(std::istream& is) {
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, "TNSR", 4) != 0) throw ConfigError("bad tensor magic");
    std::uint32_t d = 0;
    is.read(reinterpret_cast<char*>(&d), sizeof d);
    std::vector<int> dims(d);
    for (auto& n : dims) {
        std::uint64_t n64 = 0;
        is.read(reinterpret_cast<char*>(&n64), sizeof n64);
        n = static_cast<int>(n64);
    }
    DimensionProfile profile(std::move(dims));
    Eigen::VectorXd v(profile.element_count());
    is.read(reinterpret_cast<char*>(v.data()),
            static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(v.size())));
    if (!is) throw ConfigError("tensor file ended early");
    return DenseTensor(std::move(profile), std::move(v));
}

void save_tensor(const std::string& path, const DenseTensor& t, bool binary) {
    std::ofstream os(path, binary ? std::ios::binary : std::ios::out);
    if (!os) throw ConfigError("cannot open " + path + " for writing");
    binary ? write_tensor_binary(os, t) : write_tensor_text(os, t);
}

DenseTensor load_tensor(const std::string& path) {
    std::ifstream probe(path, std::ios::binary);
    if (!probe) throw ConfigError("cannot open " + path);
    char magic[4] = {};
    probe.read(magic, 4);
    probe.close();
    std::ifstream is(path, std::memcmp(magic, "TNSR", 4) == 0 ? std::ios::binary : std::ios::in);
    return std::memcmp(magic, "TNSR", 4) == 0 ? read_tensor_binary(is) : read_tensor_text(is);
}

void write_vectors_text(std::ostream& os, const UnitVectorSet& v) {
    os << "dims:";
    for (int n : v.profile().dims()) os << ' ' << n;
    os << '\n';
    os.precision(17);
    for (int j = 0; j < v.profile().mode_count(); ++j) {
        const auto& a = v.vector(j);
        for (int i = 0; i < a.size(); ++i) os << a[i] << (i + 1 == a.size() ? '\n' : ' ');
    }
}

UnitVectorSet read_vectors_text(std::istream& is) {
    DimensionProfile profile(read_dims_line(is));
    std::vector<Eigen::VectorXd> vs;
    for (int j = 0; j < profile.mode_count(); ++j) {
        Eigen::VectorXd a(profile.dim(j));
        for (int i = 0; i < a.size(); ++i)
            if (!(is >> a[i])) throw ConfigError("vector file ended early in mode " + std::to_string(j));
        vs.push_back(std::move(a));
    }
    return UnitVectorSet(std::move(profile), std::move(vs));
}

void save_vectors(const std::string& path, const UnitVectorSet& v) {
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot open " + path + " for writing");
    write_vectors_text(os, v);
}

UnitVectorSet load_vectors(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open " + path);
    return read_vectors_text(is);
}

} // namespace tct
