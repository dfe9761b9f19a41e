#include "pplla/lla.hpp"

#include "pplla/lasso.hpp"
#include "pplla/newton.hpp"

#include <algorithm>
#include <cmath>

namespace pplla {

Vec lla_weights(const PenaltySpec& penalty, const Vec& beta, const IndexSet& penalized) {
    Vec w(static_cast<Index>(penalized.size()));
    for (std::size_t k = 0; k < penalized.size(); ++k) {
        w(static_cast<Index>(k)) = derivative(penalty, std::abs(beta(penalized[k])));
    }
    return w;
}

namespace {

bool iterates_coincide(const Vec& a, const Vec& b) {
    for (Index j = 0; j < a.size(); ++j) {
        if ((a(j) == 0.0) != (b(j) == 0.0)) return false;
    }
    return (a - b).lpNorm<Eigen::Infinity>() <= 1e-8 * (1.0 + a.lpNorm<Eigen::Infinity>());
}

LlaResult run_lla(const GlmFamily& family, const Dataset& data, const IndexSet& M, const Mat& C,
                  const Vec& t, const PenaltySpec& penalty, const Vec& beta_init,
                  const LlaConfig& config, const std::optional<AdmmState>& warm) {
    penalty.validate();
    if (!(penalty.lambda > 0.0)) throw InputError("LLA requires lambda > 0");
    if (config.steps < 1) throw InputError("LLA requires at least one step");
    if (beta_init.size() != data.num_coef()) throw InputError("beta_init has the wrong length");

    // Probe problem to obtain the penalized index set.
    IndexSet unpen = M;
    if (data.has_intercept()) unpen.insert(unpen.begin(), 0);
    const IndexSet penalized = complement(unpen, data.num_coef());

    LlaResult out;
    out.iterates.push_back(beta_init);
    out.weights.push_back(lla_weights(penalty, beta_init, penalized));

    std::optional<AdmmState> state = warm;
    const int cap = config.to_fixed_point ? std::max(config.max_steps, config.steps) : config.steps;
    for (int b = 1; b <= cap; ++b) {
        ConstrainedWLassoProblem problem(family, data, M, C, t, out.weights.back());
        if (!state) state = initial_state(problem, config.admm, out.iterates.back());
        AdmmSolution sol;
        try {
            sol = solve(problem, config.admm, state);
        } catch (const SolverError& e) {
            throw SolverError("LLA step " + std::to_string(b) + ": " + e.what(), b);
        }
        out.admm_iterations += sol.diagnostics.iterations;
        state = sol.state;
        // Keep the duals but restart beta/eta from the (possibly polished) iterate.
        state->beta = sol.fit.beta;
        state->eta = problem.penalized_part(sol.fit.beta);
        state->k = 0;

        out.iterates.push_back(sol.fit.beta);
        out.weights.push_back(lla_weights(penalty, sol.fit.beta, penalized));
        out.fit = std::move(sol.fit);
        out.steps = b;
        if (config.track_convergence) {
            out.fit.objective_trace.push_back(problem.objective(out.iterates.back()));
        }
        if (b >= config.steps && config.to_fixed_point &&
            iterates_coincide(out.iterates[out.iterates.size() - 2], out.iterates.back())) {
            break;
        }
    }
    out.fit.lambda = penalty.lambda;
    out.fit.iterations = out.admm_iterations;
    out.fit.steps_coincide =
        iterates_coincide(out.iterates[out.iterates.size() - 2], out.iterates.back());
    out.admm_state = *state;
    return out;
}

}  // namespace

LlaResult lla_reduced(const GlmFamily& family, const Dataset& data, const HypothesisSpec& hyp,
                      const PenaltySpec& penalty, const Vec& beta_init, const LlaConfig& config,
                      const std::optional<AdmmState>& warm) {
    hyp.check_against(data.num_coef(), data.has_intercept());
    return run_lla(family, data, hyp.M(), hyp.C(), hyp.t(), penalty, beta_init, config, warm);
}

LlaResult lla_full(const GlmFamily& family, const Dataset& data, const IndexSet& M,
                   const PenaltySpec& penalty, const Vec& beta_init, const LlaConfig& config,
                   const std::optional<AdmmState>& warm) {
    return run_lla(family, data, M, Mat(0, static_cast<Index>(M.size())), Vec(0), penalty,
                   beta_init, config, warm);
}

std::vector<double> lla_lambda_grid(const GlmFamily& family, const Dataset& data,
                                    const HypothesisSpec& hyp, int count, double ratio) {
    IndexSet unpen = hyp.M();
    if (data.has_intercept()) unpen.insert(unpen.begin(), 0);
    RestrictedNewtonProblem rp;
    rp.active = unpen;
    rp.constrained = hyp.M();
    rp.C = hyp.C();
    rp.t = hyp.t();
    const Vec base = restricted_newton(family, data, rp).beta;
    const Vec g = gradient(family, data, base);
    const Vec g0 = gradient(family, data, null_coefficients(family, data));
    double top = 0.0;
    for (Index j : complement(unpen, data.num_coef())) {
        top = std::max({top, std::abs(g(j)), std::abs(g0(j))});
    }
    if (!(top > 0.0)) top = 1.0;
    return log_grid(top, count, ratio);
}

std::vector<std::pair<double, LlaResult>> lla_reduced_path(
    const GlmFamily& family, const Dataset& data, const HypothesisSpec& hyp,
    const PenaltySpec& penalty, const Vec& beta_init, const std::vector<double>& grid,
    const LlaConfig& config) {
    std::vector<std::pair<double, LlaResult>> path;
    path.reserve(grid.size());
    std::optional<AdmmState> warm;
    Vec init = beta_init;
    for (double lam : grid) {
        LlaResult res = lla_reduced(family, data, hyp, penalty.with_lambda(lam), init, config, warm);
        warm = res.admm_state;
        // The warm state's beta is replaced by the new initial iterate inside run_lla
        // only when no state is given, so align it here.
        if (config.warm_start_path) init = res.fit.beta;
        warm->beta = init;
        path.emplace_back(lam, std::move(res));
    }
    return path;
}

double gic_penalty(Index n, Index p) {
    const double ln = std::log(static_cast<double>(n));
    return std::max(ln, std::log(ln) * std::log(static_cast<double>(p)));
}

GicResult gic_select(const GlmFamily& family, const Dataset& data,
                     const std::vector<std::pair<double, FitResult>>& fits) {
    if (fits.empty()) throw InputError("gic_select: no fits");
    GicResult out;
    out.c_n = gic_penalty(data.n(), data.p());
    const double n = static_cast<double>(data.n());
    const Index first = data.has_intercept() ? 1 : 0;
    for (std::size_t k = 0; k < fits.size(); ++k) {
        const auto& [lam, fit] = fits[k];
        GicRow row;
        row.lambda = lam;
        row.loss = loss(family, data, fit.beta);
        for (Index j = first; j < fit.beta.size(); ++j) row.nonzeros += fit.beta(j) != 0.0;
        row.gic = n * row.loss + out.c_n * static_cast<double>(row.nonzeros);
        out.table.push_back(row);
        const GicRow& best = out.table[out.index];
        if (k > 0 && (row.gic < best.gic || (row.gic == best.gic && row.lambda > best.lambda))) {
            out.index = k;
        }
    }
    out.lambda = out.table[out.index].lambda;
    return out;
}

}  // namespace pplla
