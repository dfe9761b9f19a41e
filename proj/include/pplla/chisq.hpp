#pragma once

namespace pplla {

/// P(chi2_r <= x), regularized lower incomplete gamma.
double central_chisq_cdf(double x, double r);

/// Upper-alpha quantile: P(chi2_r > q) = alpha. Bracketed bisection, Newton polish.
double chisq_upper_quantile(double alpha, double r);

/// P(chi2_{r, nu} <= x) as a Poisson(nu/2) mixture of central CDFs with r + 2j
/// degrees of freedom. Terms stop once the remaining Poisson mass is below 1e-12.
double noncentral_chisq_cdf(double x, double r, double nu);

}  // namespace pplla
