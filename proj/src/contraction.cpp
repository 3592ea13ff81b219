#include "tct/contraction.hpp"

#include <ostream>
#include <vector>

namespace tct {

ContractedMatrix::ContractedMatrix(DimensionProfile profile, Eigen::MatrixXd entries)
    : profile_(std::move(profile)), entries_(std::move(entries)) {
    if (entries_.rows() != profile_.total_dim() || entries_.cols() != profile_.total_dim())
        throw DimensionError("contracted matrix must be N x N");
}

Eigen::Block<const Eigen::MatrixXd> ContractedMatrix::block(int j1, int j2) const {
    return entries_.block(profile_.block_offset(j1), profile_.block_offset(j2),
                          profile_.dim(j1), profile_.dim(j2));
}

Eigen::MatrixXd second_order_contraction(const DenseTensor& tensor,
                                         const UnitVectorSet& vectors,
                                         int j1, int j2) {
    const auto& profile = tensor.profile();
    const int d = profile.mode_count();
    if (j1 < 0 || j2 >= d || j1 >= j2)
        throw ArgumentError("need 0 <= j1 < j2 < d");
    if (vectors.profile() != profile)
        throw DimensionError("vector profile does not match tensor profile");

    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(profile.dim(j1), profile.dim(j2));
    const double* t = tensor.values().data();

    // One pass over the tensor with a running prefix product of the direction
    // weights over all modes except j1, j2.
    std::vector<int> idx(static_cast<std::size_t>(d), 0);
    std::vector<double> prefix(static_cast<std::size_t>(d) + 1, 1.0);
    std::int64_t flat = 0;
    int level = 0;
    const int last = d - 1;
    const bool last_is_free = (last != j1 && last != j2);
    while (true) {
        for (; level < last; ++level) {
            auto li = static_cast<std::size_t>(level);
            const double w = (level == j1 || level == j2) ? 1.0 : vectors.vector(level)[idx[li]];
            prefix[li + 1] = prefix[li] * w;
        }
        const int n_last = profile.dim(last);
        const double p = prefix[static_cast<std::size_t>(last)];
        if (last_is_free) {
            // innermost mode contracted: dot product against its weights
            double s = 0.0;
            const double* a = vectors.vector(last).data();
            for (int k = 0; k < n_last; ++k) s += t[flat + k] * a[k];
            out(idx[static_cast<std::size_t>(j1)], idx[static_cast<std::size_t>(j2)]) += p * s;
        } else {
            // j1 < j2 and the innermost mode is not free, so last == j2:
            // innermost index is the matrix column index
            double* row = out.data() + idx[static_cast<std::size_t>(j1)]; // column-major stride
            const Eigen::Index ld = out.rows();
            for (int k = 0; k < n_last; ++k) row[static_cast<Eigen::Index>(k) * ld] += p * t[flat + k];
        }
        flat += n_last;
        level = last - 1;
        while (level >= 0) {
            auto li = static_cast<std::size_t>(level);
            if (++idx[li] < profile.dim(level)) break;
            idx[li] = 0;
            --level;
        }
        if (level < 0) break;
    }
    return out;
}

ContractedMatrix phi_d(const DenseTensor& tensor, const UnitVectorSet& vectors) {
    const auto& profile = tensor.profile();
    if (vectors.profile() != profile)
        throw DimensionError("vector profile does not match tensor profile");
    const int d = profile.mode_count();
    const auto n = profile.total_dim();
    Eigen::MatrixXd entries = Eigen::MatrixXd::Zero(n, n);
    for (int j1 = 0; j1 < d; ++j1)
        for (int j2 = j1 + 1; j2 < d; ++j2) {
            const Eigen::MatrixXd b = second_order_contraction(tensor, vectors, j1, j2);
            entries.block(profile.block_offset(j1), profile.block_offset(j2), b.rows(), b.cols()) = b;
            entries.block(profile.block_offset(j2), profile.block_offset(j1), b.cols(), b.rows()) = b.transpose();
        }
    return ContractedMatrix(profile, std::move(entries));
}

double frobenius_sq(const ContractedMatrix& m) { return m.entries().squaredNorm(); }

void write_matrix_csv(std::ostream& os, const Eigen::MatrixXd& m) {
    os.precision(17);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) os << m(i, j) << (j + 1 == m.cols() ? '\n' : ',');
    }
}

} // namespace tct
