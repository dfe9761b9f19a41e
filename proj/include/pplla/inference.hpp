#pragma once

#include "pplla/hypothesis.hpp"
#include "pplla/lasso.hpp"
#include "pplla/lla.hpp"
#include "pplla/penalty.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace pplla {

enum class StatisticKind { wald, score, lrt };

std::string to_string(StatisticKind k);

struct TestReport {
    StatisticKind kind = StatisticKind::wald;
    double value = 0.0;
    Index dof = 0;
    double p_value = 1.0;
    double alpha = 0.05;
    double critical_value = 0.0;
    bool reject = false;
    double phi_hat = 1.0;
    IndexSet support_full;
    IndexSet support_reduced;
    double lambda_hat = 0.0;
    bool negative_statistic = false;   // LRT below zero: the two supports disagree
};

/// {j outside M (and the intercept) : beta_j != 0}.
IndexSet support_set(const Vec& beta, const IndexSet& M, bool has_intercept = false);

/// Tested coefficients, the intercept, and the estimated support of `beta`.
IndexSet inference_block(const Vec& beta, const IndexSet& M, bool has_intercept);

double wald_statistic(const GlmFamily& family, const Dataset& data, const Vec& beta_full,
                      const HypothesisSpec& hyp, double phi_hat);

double score_statistic(const GlmFamily& family, const Dataset& data, const Vec& beta_reduced,
                       const HypothesisSpec& hyp, double phi_hat);

double lrt_statistic(const GlmFamily& family, const Dataset& data, const Vec& beta_full,
                     const Vec& beta_reduced, double phi_hat);

struct DispersionEstimate {
    double value = 1.0;
    double denominator = 0.0;
    bool degenerate = false;   // zero residual sum of squares
};

/// Gaussian: RSS / (n - |S_hat| - |M| - 1). Logistic and poisson: exactly 1.
DispersionEstimate dispersion_estimate(const GlmFamily& family, const Dataset& data,
                                       const Vec& beta, const IndexSet& M);

/// Fills p-value, critical value and decision for a computed statistic.
TestReport make_report(StatisticKind kind, double value, Index dof, double alpha, double phi_hat);

struct TestConfig {
    double alpha = 0.05;
    PenaltyKind penalty = PenaltyKind::scad;
    double penalty_a = kDefaultScadA;
    LassoConfig lasso;
    LlaConfig lla;
    std::optional<double> fixed_lambda;   // bypasses the GIC search
};

/// Everything the pipeline produced, in the order of the reports: wald, score, lrt.
struct TestOutcome {
    std::array<TestReport, 3> reports;
    double lambda_hat = 0.0;
    double lambda_lasso = 0.0;
    Vec beta_init;
    FitResult fit_full;
    FitResult fit_reduced;
    std::optional<GicResult> gic;
    CvResult cv;
    double phi_full = 1.0;
    double phi_reduced = 1.0;
    std::vector<std::string> warnings;
};

/// cv lasso -> lasso init -> reduced LLA path -> GIC -> reduced and full LLA at the
/// selected lambda -> dispersion -> Wald, score and LRT.
TestOutcome run_test(const GlmFamily& family, const Dataset& data, const HypothesisSpec& hyp,
                     const TestConfig& config);

/// Wald/score/LRT from given full and reduced estimates, with the usual dispersion pairing.
std::array<TestReport, 3> test_from_fits(const GlmFamily& family, const Dataset& data,
                                         const HypothesisSpec& hyp, const Vec& beta_full,
                                         const Vec& beta_reduced, double alpha, double lambda_hat,
                                         double* phi_full = nullptr, double* phi_reduced = nullptr);

/// Lasso initializer plus full-model LLA with no tested coordinates, lambda by GIC
/// (or config.fixed_lambda).
struct FitOutcome {
    double lambda_hat = 0.0;
    double lambda_lasso = 0.0;
    Vec beta_init;
    FitResult fit;
    std::optional<GicResult> gic;
    CvResult cv;
    std::vector<std::string> warnings;
};

FitOutcome fit_model(const GlmFamily& family, const Dataset& data, const TestConfig& config);

struct NoncentralParams {
    Mat Psi;
    Vec h;
    double nu = 0.0;
};

/// Noncentrality of the approximating chi-square at the true coefficients.
NoncentralParams noncentral_params(const GlmFamily& family, const Dataset& data,
                                   const Vec& beta_star, const HypothesisSpec& hyp, double phi_star,
                                   const IndexSet& support_star);

/// P(chi2(r, nu_n) > chi2_alpha(r)).
double power_approx(const GlmFamily& family, const Dataset& data, const Vec& beta_star,
                    const HypothesisSpec& hyp, double phi_star, const IndexSet& support_star,
                    double alpha);

}  // namespace pplla
