#pragma once

#include "pplla/inference.hpp"
#include "pplla/rng.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace pplla {

/// Standard normal draws by Box-Muller on top of Philox uniforms.
class NormalSampler {
public:
    double operator()(Philox4x32& rng);

private:
    bool has_spare_ = false;
    double spare_ = 0.0;
};

/// Rows i.i.d. N(0, Sigma) with Sigma_jk = rho^|j-k|, via the AR(1) recursion.
Mat gen_design(Index n, Index p, double rho, Philox4x32& rng);

/// y = X beta + N(0,1), Bernoulli(expit(X beta)) or Poisson(exp(X beta)).
Vec gen_response(const GlmFamily& family, const Mat& X, const Vec& beta_star, Philox4x32& rng);

enum class BetaDesign { shifted_pair, sparse_three, custom };
enum class HypothesisId { h1, h2, h3, beta3_zero, custom };
enum class SimMode { rejection, estimation };

struct SimScenario {
    std::string name = "scenario";
    SimMode mode = SimMode::rejection;
    Family family = Family::gaussian;
    Index n = 100;
    Index p = 50;
    double rho = 0.5;
    BetaDesign design = BetaDesign::shifted_pair;   // (2, -2 - h1, 0, ...)
    Vec custom_beta;
    double h1 = 0.0;
    HypothesisId hypothesis = HypothesisId::h1;
    std::optional<HypothesisSpec> custom_hypothesis;
    int reps = 500;
    double alpha = 0.05;
    std::uint64_t seed = 1;
    bool has_intercept = false;
    TestConfig test;                                // pipeline settings; alpha is taken from above

    void validate() const;
};

Vec build_beta_star(const SimScenario& s);
HypothesisSpec build_hypothesis(const SimScenario& s);

/// Outcome of one simulated dataset.
struct ReplicationRecord {
    bool ok = false;
    std::string error;
    std::array<double, 3> lla_stat{};       // wald, score, lrt
    std::array<double, 3> oracle_stat{};
    std::array<bool, 3> lla_reject{};
    std::array<bool, 3> oracle_reject{};
    bool full_matches_oracle = false;       // coordinatewise within 1e-6
    bool reduced_matches_oracle = false;
    bool events_full = false;               // E_a1 and E_a2
    bool events_reduced = false;            // E_01 and E_02
    double power_approx = 0.0;
    double lambda_hat = 0.0;
    // Estimation-mode metrics: [0] full model, [1] reduced model.
    std::array<double, 2> l1_loss{};
    std::array<double, 2> l2_loss{};
    std::array<double, 2> false_pos{};
    std::array<double, 2> false_neg{};
};

ReplicationRecord run_replication(const SimScenario& s, int index);

struct RateColumn {
    std::string estimator;    // "lla" or "oracle"
    std::string statistic;    // "lrt", "wald", "score"
    int rejections = 0;
    double percent = 0.0;
    double se = 0.0;          // sqrt(p(1-p)/reps) * 100
};

struct RejectionTable {
    std::string scenario;
    Index p = 0;
    double h1 = 0.0;
    int reps = 0;             // successful replications
    int failures = 0;
    std::vector<std::string> failure_messages;
    std::vector<RateColumn> columns;   // LLA then oracle, each LRT, Wald, score
    double statistic_agreement = 0.0;  // min over statistic pairs of LLA decision agreement
    double lla_oracle_agreement = 0.0; // min over statistics of LLA vs oracle decision agreement
    double full_match_rate = 0.0;
    double reduced_match_rate = 0.0;
    double both_match_rate = 0.0;
    double events_rate = 0.0;          // E1 and E2 for both models
    double mean_power_approx = 0.0;
    double mean_lambda_hat = 0.0;

    const RateColumn& column(const std::string& estimator, const std::string& statistic) const;
};

struct LossRow {
    std::string method;
    double l1 = 0.0, l1_se = 0.0;
    double l2 = 0.0, l2_se = 0.0;
    double fp = 0.0, fp_se = 0.0;
    double fn = 0.0, fn_se = 0.0;
};

struct LossTable {
    std::string scenario;
    Index p = 0;
    int reps = 0;
    int failures = 0;
    std::vector<std::string> failure_messages;
    std::vector<LossRow> rows;   // LLA (full), LLA (reduced)
};

/// Runs every replication (on `jobs` threads) and returns the per-index records.
/// The result does not depend on `jobs`.
std::vector<ReplicationRecord> run_all(const SimScenario& s, int jobs = 1);

/// Throws SolverError when more than 5% of replications failed.
RejectionTable run_replications(const SimScenario& s, int jobs = 1);
RejectionTable tabulate_rejections(const SimScenario& s, const std::vector<ReplicationRecord>& recs);

LossTable estimator_comparison(const SimScenario& s, int jobs = 1);
LossTable tabulate_losses(const SimScenario& s, const std::vector<ReplicationRecord>& recs);

/// l1, l2 losses and false positive / negative counts of `beta_hat` against `beta_star`
/// (intercept excluded). A coefficient is selected when it is nonzero.
struct SelectionMetrics {
    double l1 = 0.0;
    double l2 = 0.0;
    int false_pos = 0;
    int false_neg = 0;
};
SelectionMetrics selection_metrics(const Vec& beta_hat, const Vec& beta_star, bool has_intercept);

// JSON scenario files and table output.
SimScenario scenario_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SimScenario& s);
/// A scenario file may list several h1 values and hypotheses; this returns one
/// scenario per (hypothesis, h1) pair, hypotheses outermost.
std::vector<SimScenario> expand_scenarios(const nlohmann::json& j);
nlohmann::json to_json(const RejectionTable& t);
nlohmann::json to_json(const LossTable& t);
std::string render_text(const RejectionTable& t);
std::string render_text(const LossTable& t);

}  // namespace pplla
