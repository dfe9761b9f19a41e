#pragma once

#include "pplla/types.hpp"

#include <string>
#include <string_view>

namespace pplla {

enum class Family { gaussian, logistic, poisson };

/// Canonical exponential family with cumulant function b.
struct GlmFamily {
    Family kind = Family::gaussian;

    // Dispersion is fixed at one for logistic and poisson.
    bool dispersion_known() const { return kind != Family::gaussian; }
    // Constant K with |b'''| <= K b''.
    double self_concordance_bound() const { return kind == Family::gaussian ? 0.0 : 1.0; }
};

std::string to_string(Family f);
Family family_from_string(std::string_view name);

struct CumulantDerivs {
    double b = 0.0;
    double b1 = 0.0;
    double b2 = 0.0;
    double b3 = 0.0;
};

// Predictors above this are replaced by a quadratic extension of exp inside loss evaluation.
inline constexpr double kPoissonThetaClamp = 30.0;

/// b and its first three derivatives at theta. Throws OverflowError when exp(theta)
/// is not representable (poisson).
CumulantDerivs b_derivs(const GlmFamily& family, double theta);

/// Same as b_derivs but with the poisson cumulant extended quadratically beyond
/// kPoissonThetaClamp. Every extension bumps poisson_clamp_count().
CumulantDerivs b_derivs_clamped(const GlmFamily& family, double theta);

long long poisson_clamp_count();

/// Design matrix and response. When has_intercept is set, coefficient 0 is the
/// intercept and column j of X maps to coefficient j + 1.
class Dataset {
public:
    Dataset(Mat X, Vec y, bool has_intercept = false);

    Index n() const { return design_.rows(); }
    Index p() const { return p_; }
    Index num_coef() const { return design_.cols(); }
    bool has_intercept() const { return has_intercept_; }

    const Mat& design() const { return design_; }
    const Vec& y() const { return y_; }
    Mat raw_X() const;

    Dataset subset(const std::vector<Index>& rows) const;

private:
    Mat design_;
    Vec y_;
    Index p_;
    bool has_intercept_;
};

/// Response values outside the family's support raise InputError.
void validate_response(const GlmFamily& family, const Dataset& data);

/// Negative average log-likelihood -(1/n){y'Zb - 1'b(Zb)}.
double loss(const GlmFamily& family, const Dataset& data, const Vec& beta);
double loss_from_predictor(const GlmFamily& family, const Vec& y, const Vec& theta);

Vec gradient(const GlmFamily& family, const Dataset& data, const Vec& beta);

/// (1/n) Z_cols' diag(b'') Z_cols.
Mat hessian_block(const GlmFamily& family, const Dataset& data, const Vec& beta,
                  const IndexSet& cols);

/// Componentwise b'(theta) and b''(theta) using the clamped cumulant.
Vec mean_response(const GlmFamily& family, const Vec& theta);
Vec variance_weights(const GlmFamily& family, const Vec& theta);

}  // namespace pplla
