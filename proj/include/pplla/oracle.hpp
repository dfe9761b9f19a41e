#pragma once

#include "pplla/hypothesis.hpp"
#include "pplla/newton.hpp"
#include "pplla/penalty.hpp"

#include <optional>

namespace pplla {

/// Known-support problem: coefficients outside M, S = M^c intersect A and the
/// intercept are fixed at zero.
class OracleProblem {
public:
    OracleProblem(GlmFamily family, const Dataset& data, IndexSet M, IndexSet A,
                  std::optional<HypothesisSpec> hyp = std::nullopt);

    const GlmFamily& family() const { return family_; }
    const Dataset& data() const { return *data_; }
    const IndexSet& M() const { return M_; }
    const IndexSet& A() const { return A_; }
    const IndexSet& S() const { return S_; }
    const std::optional<HypothesisSpec>& hypothesis() const { return hyp_; }

    /// M, S and the intercept.
    IndexSet active() const;
    /// Penalized coordinates outside S.
    IndexSet inactive() const;

private:
    GlmFamily family_;
    const Dataset* data_;
    IndexSet M_;
    IndexSet A_;
    IndexSet S_;
    std::optional<HypothesisSpec> hyp_;
};

FitResult fit_oracle_full(const OracleProblem& problem, const NewtonOptions& options = {});

/// Equality-constrained Newton on M and S. fit.multiplier holds nu with
/// grad_M loss = C' nu at the solution.
FitResult fit_oracle_reduced(const OracleProblem& problem, const NewtonOptions& options = {});

/// Margins behind the one-step and two-step LLA events. NaN entries mean the
/// quantity needs beta_star and none was supplied.
struct EventReport {
    double init_error = 0.0;        // ||beta_init - beta*||_max on M^c
    double init_bound = 0.0;        // a0 lambda
    double gradient_max = 0.0;      // ||grad loss(oracle)||_max off M and S
    double gradient_bound = 0.0;    // a1 lambda
    double oracle_min = 0.0;        // min_{j in S} |oracle_j|, +inf when S is empty
    double oracle_bound = 0.0;      // a lambda
    double signal_min = 0.0;        // min_{j in S} |beta*_j|, +inf when S is empty
    double signal_bound = 0.0;      // (a + 1) lambda

    bool init_ok = false;
    bool gradient_ok = false;
    bool oracle_ok = false;
    bool signal_ok = false;
    bool have_truth = false;

    /// First-step event: initial estimator close enough and small off-support gradient.
    bool one_step() const { return init_ok && gradient_ok; }
    /// Second-step event: small off-support gradient and oracle clear of a*lambda.
    bool two_step() const { return gradient_ok && oracle_ok; }
    bool all() const { return one_step() && two_step(); }
};

EventReport check_lla_events(const OracleProblem& problem, const FitResult& oracle_fit,
                             const PenaltySpec& penalty, const Vec& beta_init,
                             const std::optional<Vec>& beta_star = std::nullopt);

}  // namespace pplla
