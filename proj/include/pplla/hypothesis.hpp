#pragma once

#include "pplla/types.hpp"

namespace pplla {

/// Linear hypothesis C beta_M = t on the tested coefficients M.
class HypothesisSpec {
public:
    /// Validates shapes and full row rank of C. `num_coef` and `has_intercept`
    /// are used to reject out-of-range indices and an intercept inside M.
    HypothesisSpec(IndexSet M, Mat C, Vec t);

    const IndexSet& M() const { return M_; }
    const Mat& C() const { return C_; }
    const Vec& t() const { return t_; }
    Index r() const { return C_.rows(); }
    Index m() const { return static_cast<Index>(M_.size()); }

    /// Throws InputError unless every index lies in [first_penalizable, num_coef).
    void check_against(Index num_coef, bool has_intercept) const;

    /// (QC, Qt) for invertible Q.
    HypothesisSpec transformed(const Mat& Q) const;

private:
    IndexSet M_;
    Mat C_;
    Vec t_;
};

/// Numerical rank via column-pivoted QR with a relative threshold.
Index matrix_rank(const Mat& A);

}  // namespace pplla
