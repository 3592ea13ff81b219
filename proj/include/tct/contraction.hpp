#ifndef TCT_CONTRACTION_HPP
#define TCT_CONTRACTION_HPP

#include <Eigen/Dense>
#include <iosfwd>

#include "tct/tensor.hpp"

namespace tct {

// N x N symmetric block matrix produced by the contraction operator.
// Diagonal blocks are identically zero; block (j1,j2) for j1 < j2 holds the
// second-order contraction matrix, mirrored below the diagonal.
class ContractedMatrix {
public:
    ContractedMatrix(DimensionProfile profile, Eigen::MatrixXd entries);

    const DimensionProfile& profile() const { return profile_; }
    const Eigen::MatrixXd& entries() const { return entries_; }
    Eigen::Index size() const { return entries_.rows(); }
    // view of block (j1, j2)
    Eigen::Block<const Eigen::MatrixXd> block(int j1, int j2) const;

private:
    DimensionProfile profile_;
    Eigen::MatrixXd entries_;
};

// entry (s,t) = sum over all other indices of T * prod_{l != j1,j2} a^(l)_{i_l}
Eigen::MatrixXd second_order_contraction(const DenseTensor& tensor,
                                         const UnitVectorSet& vectors,
                                         int j1, int j2);

ContractedMatrix phi_d(const DenseTensor& tensor, const UnitVectorSet& vectors);

double frobenius_sq(const ContractedMatrix& m);

// CSV dump, one row per line
void write_matrix_csv(std::ostream& os, const Eigen::MatrixXd& m);

} // namespace tct

#endif
