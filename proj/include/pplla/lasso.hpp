#pragma once

#include "pplla/glm.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace pplla {

struct LassoOptions {
    int max_iter = 20000;
    double tol = 1e-7;
};

/// Thrown when proximal gradient runs out of iterations; carries the last iterate.
class LassoNotConverged : public SolverError {
public:
    LassoNotConverged(const std::string& what, int iteration, Vec last)
        : SolverError(what, iteration), last_(std::move(last)) {}
    const Vec& last_iterate() const { return last_; }

private:
    Vec last_;
};

/// l1-penalized GLM fit: minimizes loss(beta) + lambda * ||beta||_1 with the
/// intercept unpenalized. Proximal gradient with backtracking line search, run on
/// internally standardized columns (the penalty is rescaled, so the estimator is
/// unchanged).
FitResult fit_lasso(const GlmFamily& family, const Dataset& data, double lambda,
                    const LassoOptions& options = {},
                    const std::optional<Vec>& warm_start = std::nullopt);

/// Largest penalty at which the lasso solution is zero (intercept-only).
double lasso_lambda_max(const GlmFamily& family, const Dataset& data);

/// Intercept-only (or all-zero) coefficient vector.
Vec null_coefficients(const GlmFamily& family, const Dataset& data);

/// Descending log-spaced grid from `lambda_max` to `ratio * lambda_max`.
std::vector<double> log_grid(double lambda_max, int count, double ratio);

struct LassoConfig {
    std::vector<double> lambda_grid;   // empty: 50 points from lambda_max to 0.01 lambda_max
    int folds = 10;
    LassoOptions solver;
    std::uint64_t seed = 0;
};

struct CvResult {
    double lambda = 0.0;
    std::vector<double> grid;
    std::vector<double> cv_curve;       // mean held-out loss per grid point
    int skipped_folds = 0;
    std::vector<std::string> warnings;
};

/// K-fold cross-validation of the lasso penalty by held-out deviance.
CvResult cv_select(const GlmFamily& family, const Dataset& data, const LassoConfig& config);

/// Soft-threshold operator sign(x) max(|x| - k, 0).
inline double soft_threshold(double x, double k) {
    if (x > k) return x - k;
    if (x < -k) return x + k;
    return 0.0;
}

}  // namespace pplla
