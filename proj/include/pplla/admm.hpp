#pragma once

#include "pplla/glm.hpp"
#include "pplla/newton.hpp"

#include <memory>
#include <optional>

namespace pplla {

/// min loss(beta) + sum_j w_j |beta_j| over penalized j, subject to C beta_M = t.
/// The penalized set is every coefficient outside M and the intercept. An empty C
/// (zero rows) gives the unconstrained weighted lasso used for full-model fits.
class ConstrainedWLassoProblem {
public:
    ConstrainedWLassoProblem(GlmFamily family, const Dataset& data, IndexSet M, Mat C, Vec t,
                             Vec weights);

    const GlmFamily& family() const { return family_; }
    const Dataset& data() const { return *data_; }
    const IndexSet& M() const { return M_; }
    const Mat& C() const { return C_; }
    const Vec& t() const { return t_; }
    const Vec& weights() const { return weights_; }
    Index r() const { return C_.rows(); }

    /// Coefficients carrying a weighted l1 term, in the order of `weights`.
    const IndexSet& penalized() const { return penalized_; }
    /// M plus the intercept.
    const IndexSet& unpenalized() const { return unpenalized_; }

    /// Number of penalized coefficients outside M, i.e. |M^c| without the intercept.
    Index num_penalized() const { return static_cast<Index>(penalized_.size()); }

    /// Penalized coordinates of a full coefficient vector.
    Vec penalized_part(const Vec& beta) const { return gather(beta, penalized_); }
    /// C beta_M (empty when unconstrained).
    Vec constraint_value(const Vec& beta) const;

    double objective(const Vec& beta) const;

private:
    GlmFamily family_;
    const Dataset* data_;
    IndexSet M_;
    Mat C_;
    Vec t_;
    Vec weights_;
    IndexSet penalized_;
    IndexSet unpenalized_;
};

struct AdmmConfig {
    double rho = 1.0;
    double tol_primal = 1e-7;     // absolute, scaled by sqrt(dimension)
    double tol_dual = 1e-7;
    double tol_relative = 1e-7;   // relative to iterate norms
    int max_iter = 50000;
    double newton_tol = 1e-10;
    int newton_max = 50;
    bool adaptive_rho = true;
    bool polish = true;           // active-set refinement after convergence, KKT-verified
};

struct AdmmState {
    Vec beta;
    Vec eta;
    Vec nu1;
    Vec nu2;
    double rho = 1.0;
    int k = 0;
};

/// beta0 = start (or zero), eta0 = beta0 on the penalized set, duals zero.
AdmmState initial_state(const ConstrainedWLassoProblem& problem, const AdmmConfig& config,
                        const std::optional<Vec>& start = std::nullopt);

/// Caches the Gram matrix and the Cholesky factor of the gaussian beta-update
/// system for the current rho.
class AdmmWorkspace {
public:
    explicit AdmmWorkspace(const ConstrainedWLassoProblem& problem);

    const Eigen::LLT<Mat>& gaussian_factor(double rho);
    const Mat& gram() const { return gram_; }
    const Vec& zy() const { return zy_; }
    /// C~'C~ + E_P'E_P: the quadratic coupling added by the augmented Lagrangian.
    const Mat& coupling() const { return coupling_; }

private:
    const ConstrainedWLassoProblem* problem_;
    Mat gram_;
    Vec zy_;
    Mat coupling_;
    double factored_rho_ = -1.0;
    Eigen::LLT<Mat> factor_;
};

/// argmin_beta loss + (rho/2)||C beta_M - t + nu1/rho||^2 + (rho/2)||beta_P - eta + nu2/rho||^2.
/// Gaussian: one linear solve. Other families: damped Newton from state.beta; if
/// `newton_trace` is given it receives the objective after every accepted step.
Vec beta_update(const AdmmState& state, const ConstrainedWLassoProblem& problem,
                const AdmmConfig& config, AdmmWorkspace& workspace,
                std::vector<double>* newton_trace = nullptr);

/// Componentwise soft-threshold of beta_P + nu2/rho at w/rho.
Vec eta_update(const AdmmState& state, const ConstrainedWLassoProblem& problem);

/// nu1 += rho (C beta_M - t), nu2 += rho (beta_P - eta).
void dual_update(AdmmState& state, const ConstrainedWLassoProblem& problem);

struct AdmmDiagnostics {
    int iterations = 0;
    std::vector<double> primal_residual;
    std::vector<double> dual_residual;
    double final_rho = 1.0;
    int rho_changes = 0;
    bool polished = false;
};

class AdmmNotConverged : public SolverError {
public:
    AdmmNotConverged(const std::string& what, int iteration, AdmmDiagnostics diag)
        : SolverError(what, iteration), diag_(std::move(diag)) {}
    const AdmmDiagnostics& diagnostics() const { return diag_; }

private:
    AdmmDiagnostics diag_;
};

struct AdmmSolution {
    FitResult fit;        // beta with the penalized block taken from eta
    AdmmState state;
    AdmmDiagnostics diagnostics;
};

AdmmSolution solve(const ConstrainedWLassoProblem& problem, const AdmmConfig& config = {},
                   const std::optional<AdmmState>& warm = std::nullopt);

/// Largest violation of the constrained weighted-lasso optimality conditions,
/// using the least-squares multiplier for the constraint block.
struct KktResiduals {
    double tested = 0.0;      // ||grad_M - C' nu||_max (plus intercept gradient)
    double zero = 0.0;        // max over zero penalized coords of (|grad_j| - w_j)_+
    double active = 0.0;      // max over nonzero penalized coords of |grad_j + w_j sign|
    double feasibility = 0.0; // ||C beta_M - t||_2

    double max() const;
};

KktResiduals kkt_residuals(const ConstrainedWLassoProblem& problem, const Vec& beta);

}  // namespace pplla
