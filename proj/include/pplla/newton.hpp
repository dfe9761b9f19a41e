#pragma once

#include "pplla/glm.hpp"

#include <optional>

namespace pplla {

struct NewtonOptions {
    double tol = 1e-10;     // stationarity, max-norm
    int max_iter = 100;
    double ridge = 1e-8;    // damping floor added when the Hessian block is not PD
};

/// Minimizes loss(beta) + linear'beta_A over coefficients in `active` (all other
/// coefficients fixed at zero), optionally subject to C beta_M = t with M a subset of
/// `active`. Damped Newton with step halving; each step solves the KKT system
/// through a Cholesky factor of the Hessian block and its Schur complement.
struct RestrictedNewtonProblem {
    IndexSet active;
    Vec linear;                 // empty or |active|
    IndexSet constrained;       // M, a subset of active
    Mat C;                      // r x |M|, r may be 0
    Vec t;
};

struct RestrictedNewtonResult {
    Vec beta;                   // full length, zero off `active`
    Vec multiplier;             // gradient on M equals C' multiplier at the solution
    int iterations = 0;
    double objective = 0.0;
    std::vector<double> trace;
};

RestrictedNewtonResult restricted_newton(const GlmFamily& family, const Dataset& data,
                                         const RestrictedNewtonProblem& problem,
                                         const std::optional<Vec>& start = std::nullopt,
                                         const NewtonOptions& options = {});

/// Cholesky of a symmetric matrix, retrying once with `ridge * I` added. Throws
/// SolverError naming `what` if both attempts fail.
Eigen::LLT<Mat> robust_cholesky(const Mat& A, double ridge, const char* what);

}  // namespace pplla
