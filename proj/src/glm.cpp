#include "pplla/glm.hpp"

#include <atomic>
#include <cmath>
#include <limits>

namespace pplla {

namespace {

std::atomic<long long> g_clamp_count{0};

// log(DBL_MAX)
constexpr double kExpOverflow = 709.78;

CumulantDerivs logistic_derivs(double theta) {
    CumulantDerivs d;
    if (theta <= 0.0) {
        double e = std::exp(theta);
        d.b = std::log1p(e);
        d.b1 = e / (1.0 + e);
    } else {
        double e = std::exp(-theta);
        d.b = theta + std::log1p(e);
        d.b1 = 1.0 / (1.0 + e);
    }
    double q = 1.0 - d.b1;
    d.b2 = d.b1 * q;
    d.b3 = d.b2 * (q - d.b1);
    return d;
}

}  // namespace

std::string to_string(Family f) {
    switch (f) {
        case Family::gaussian: return "gaussian";
        case Family::logistic: return "logistic";
        case Family::poisson: return "poisson";
    }
    return "unknown";
}

Family family_from_string(std::string_view name) {
    if (name == "gaussian" || name == "linear") return Family::gaussian;
    if (name == "logistic" || name == "binomial") return Family::logistic;
    if (name == "poisson") return Family::poisson;
    throw InputError("unknown family '" + std::string(name) + "'");
}

CumulantDerivs b_derivs(const GlmFamily& family, double theta) {
    if (!std::isfinite(theta)) throw InputError("linear predictor is not finite");
    switch (family.kind) {
        case Family::gaussian:
            return {0.5 * theta * theta, theta, 1.0, 0.0};
        case Family::logistic:
            return logistic_derivs(theta);
        case Family::poisson: {
            if (theta > kExpOverflow) {
                throw OverflowError("poisson cumulant exp(theta) overflows at theta = " +
                                    std::to_string(theta));
            }
            double e = std::exp(theta);
            return {e, e, e, e};
        }
    }
    return {};
}

CumulantDerivs b_derivs_clamped(const GlmFamily& family, double theta) {
    if (family.kind != Family::poisson || theta <= kPoissonThetaClamp) {
        return b_derivs(family, theta);
    }
    g_clamp_count.fetch_add(1, std::memory_order_relaxed);
    // Second-order Taylor extension of exp at the clamp point: convex and C2.
    const double e = std::exp(kPoissonThetaClamp);
    const double d = theta - kPoissonThetaClamp;
    return {e * (1.0 + d + 0.5 * d * d), e * (1.0 + d), e, 0.0};
}

long long poisson_clamp_count() { return g_clamp_count.load(std::memory_order_relaxed); }

Dataset::Dataset(Mat X, Vec y, bool has_intercept)
    : y_(std::move(y)), p_(X.cols()), has_intercept_(has_intercept) {
    if (X.rows() < 1 || X.cols() < 1) throw InputError("dataset needs n >= 1 and p >= 1");
    if (X.rows() != y_.size()) {
        throw InputError("design has " + std::to_string(X.rows()) + " rows but response has " +
                         std::to_string(y_.size()) + " entries");
    }
    if (!X.allFinite() || !y_.allFinite()) throw InputError("dataset contains non-finite values");
    if (has_intercept_) {
        design_.resize(X.rows(), X.cols() + 1);
        design_.col(0).setOnes();
        design_.rightCols(X.cols()) = X;
    } else {
        design_ = std::move(X);
    }
}

Mat Dataset::raw_X() const {
    return has_intercept_ ? Mat(design_.rightCols(p_)) : design_;
}

Dataset Dataset::subset(const std::vector<Index>& rows) const {
    Mat X(static_cast<Index>(rows.size()), p_);
    Vec y(static_cast<Index>(rows.size()));
    const Index off = has_intercept_ ? 1 : 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        X.row(static_cast<Index>(i)) = design_.row(rows[i]).segment(off, p_);
        y(static_cast<Index>(i)) = y_(rows[i]);
    }
    return Dataset(std::move(X), std::move(y), has_intercept_);
}

void validate_response(const GlmFamily& family, const Dataset& data) {
    const Vec& y = data.y();
    for (Index i = 0; i < y.size(); ++i) {
        const double v = y(i);
        if (family.kind == Family::logistic && v != 0.0 && v != 1.0) {
            throw InputError("logistic response must be 0/1; row " + std::to_string(i + 1) +
                             " has " + std::to_string(v));
        }
        if (family.kind == Family::poisson && (v < 0.0 || v != std::floor(v))) {
            throw InputError("poisson response must be a nonnegative integer; row " +
                             std::to_string(i + 1) + " has " + std::to_string(v));
        }
    }
}

namespace {

void check_beta(const Dataset& data, const Vec& beta) {
    if (beta.size() != data.num_coef()) {
        throw InputError("coefficient vector has length " + std::to_string(beta.size()) +
                         ", expected " + std::to_string(data.num_coef()));
    }
}

}  // namespace

double loss_from_predictor(const GlmFamily& family, const Vec& y, const Vec& theta) {
    double acc = 0.0;
    for (Index i = 0; i < theta.size(); ++i) {
        acc += y(i) * theta(i) - b_derivs_clamped(family, theta(i)).b;
    }
    return -acc / static_cast<double>(theta.size());
}

double loss(const GlmFamily& family, const Dataset& data, const Vec& beta) {
    check_beta(data, beta);
    return loss_from_predictor(family, data.y(), data.design() * beta);
}

Vec mean_response(const GlmFamily& family, const Vec& theta) {
    Vec mu(theta.size());
    for (Index i = 0; i < theta.size(); ++i) mu(i) = b_derivs_clamped(family, theta(i)).b1;
    return mu;
}

Vec variance_weights(const GlmFamily& family, const Vec& theta) {
    Vec w(theta.size());
    for (Index i = 0; i < theta.size(); ++i) w(i) = b_derivs_clamped(family, theta(i)).b2;
    return w;
}

Vec gradient(const GlmFamily& family, const Dataset& data, const Vec& beta) {
    check_beta(data, beta);
    const Vec theta = data.design() * beta;
    const Vec resid = data.y() - mean_response(family, theta);
    return -(data.design().transpose() * resid) / static_cast<double>(data.n());
}

Mat hessian_block(const GlmFamily& family, const Dataset& data, const Vec& beta,
                  const IndexSet& cols) {
    check_beta(data, beta);
    if (cols.empty()) throw InputError("hessian_block: empty column set");
    for (Index c : cols) {
        if (c < 0 || c >= data.num_coef()) throw InputError("hessian_block: column out of range");
    }
    const Mat Zc = gather_cols(data.design(), cols);
    const Vec w = variance_weights(family, data.design() * beta);
    Mat H = Zc.transpose() * w.asDiagonal() * Zc;
    H /= static_cast<double>(data.n());
    return 0.5 * (H + H.transpose());
}

}  // namespace pplla
