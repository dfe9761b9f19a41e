#pragma once

#include "pplla/admm.hpp"
#include "pplla/hypothesis.hpp"
#include "pplla/penalty.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace pplla {

struct LlaConfig {
    int steps = 2;                 // B
    bool to_fixed_point = false;   // keep iterating past B until two iterates coincide
    int max_steps = 100;           // cap when running to a fixed point
    std::vector<double> lambda_grid;  // empty: default grid from lla_lambda_grid
    int grid_size = 20;
    double grid_ratio = 0.05;
    bool warm_start_path = false;  // use the previous lambda's output as beta_init
    AdmmConfig admm;
    bool track_convergence = false;
};

/// One LLA run. `iterates[b]` and `weights[b]` hold beta^(b) and w^(b) for
/// b = 0..steps; fit.beta is the last iterate.
struct LlaResult {
    FitResult fit;
    std::vector<Vec> iterates;
    std::vector<Vec> weights;
    AdmmState admm_state;
    int admm_iterations = 0;
    int steps = 0;
};

/// Adaptive weights p'_lambda(|beta_j|) on the penalized coordinates of `problem`.
Vec lla_weights(const PenaltySpec& penalty, const Vec& beta, const IndexSet& penalized);

/// Reduced-model estimator: weighted-lasso LLA steps under C beta_M = t.
LlaResult lla_reduced(const GlmFamily& family, const Dataset& data, const HypothesisSpec& hyp,
                      const PenaltySpec& penalty, const Vec& beta_init, const LlaConfig& config,
                      const std::optional<AdmmState>& warm = std::nullopt);

/// Full-model estimator: same steps without the constraint.
LlaResult lla_full(const GlmFamily& family, const Dataset& data, const IndexSet& M,
                   const PenaltySpec& penalty, const Vec& beta_init, const LlaConfig& config,
                   const std::optional<AdmmState>& warm = std::nullopt);

/// Descending log grid. Its top is the larger of the largest penalized gradient
/// entry at the null model and at the restricted fit on the unpenalized block,
/// so the reduced weighted lasso with weights lambda is all zero there.
std::vector<double> lla_lambda_grid(const GlmFamily& family, const Dataset& data,
                                    const HypothesisSpec& hyp, int count, double ratio);

/// lla_reduced over a lambda grid. ADMM state is carried between neighbouring
/// lambdas; beta_init is carried only when config.warm_start_path is set.
std::vector<std::pair<double, LlaResult>> lla_reduced_path(
    const GlmFamily& family, const Dataset& data, const HypothesisSpec& hyp,
    const PenaltySpec& penalty, const Vec& beta_init, const std::vector<double>& grid,
    const LlaConfig& config);

struct GicRow {
    double lambda = 0.0;
    double loss = 0.0;
    Index nonzeros = 0;
    double gic = 0.0;
};

struct GicResult {
    double lambda = 0.0;
    std::size_t index = 0;
    double c_n = 0.0;
    std::vector<GicRow> table;
};

/// max{log n, log(log n) log p}.
double gic_penalty(Index n, Index p);

/// argmin over lambda of n loss + c_n ||beta||_0 (intercept not counted); ties go
/// to the larger lambda.
GicResult gic_select(const GlmFamily& family, const Dataset& data,
                     const std::vector<std::pair<double, FitResult>>& fits);

}  // namespace pplla
