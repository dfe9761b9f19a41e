#include "pplla/hypothesis.hpp"

#include <algorithm>
#include <cmath>

namespace pplla {

Index matrix_rank(const Mat& A) {
    if (A.size() == 0) return 0;
    Eigen::ColPivHouseholderQR<Mat> qr(A);
    qr.setThreshold(1e-10);
    return qr.rank();
}

HypothesisSpec::HypothesisSpec(IndexSet M, Mat C, Vec t)
    : M_(std::move(M)), C_(std::move(C)), t_(std::move(t)) {
    if (M_.empty()) throw InputError("hypothesis: tested set M is empty");
    if (!std::is_sorted(M_.begin(), M_.end()) ||
        std::adjacent_find(M_.begin(), M_.end()) != M_.end()) {
        throw InputError("hypothesis: M must be sorted without duplicates");
    }
    if (C_.cols() != m()) {
        throw InputError("hypothesis: C has " + std::to_string(C_.cols()) + " columns but |M| = " +
                         std::to_string(m()));
    }
    if (C_.rows() < 1) throw InputError("hypothesis: C needs at least one row");
    if (t_.size() != C_.rows()) throw InputError("hypothesis: t length must equal rows of C");
    if (!C_.allFinite() || !t_.allFinite()) throw InputError("hypothesis: non-finite entries");
    if (matrix_rank(C_) != C_.rows()) throw InputError("constraint matrix rank deficient");
}

void HypothesisSpec::check_against(Index num_coef, bool has_intercept) const {
    const Index first = has_intercept ? 1 : 0;
    for (Index j : M_) {
        if (j < first || j >= num_coef) {
            throw InputError("hypothesis: tested index " + std::to_string(j) +
                             " is outside the penalizable coefficients");
        }
    }
}

HypothesisSpec HypothesisSpec::transformed(const Mat& Q) const {
    return HypothesisSpec(M_, Q * C_, Q * t_);
}

}  // namespace pplla
