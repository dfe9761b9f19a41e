#include "pplla/oracle.hpp"

#include <cmath>
#include <limits>

namespace pplla {

OracleProblem::OracleProblem(GlmFamily family, const Dataset& data, IndexSet M, IndexSet A,
                             std::optional<HypothesisSpec> hyp)
    : family_(family), data_(&data), M_(std::move(M)), A_(std::move(A)), hyp_(std::move(hyp)) {
    const Index first = data.has_intercept() ? 1 : 0;
    for (Index j : A_) {
        if (j < first || j >= data.num_coef()) throw InputError("oracle: support index out of range");
    }
    for (Index j : M_) {
        if (j < first || j >= data.num_coef()) throw InputError("oracle: tested index out of range");
    }
    if (hyp_ && hyp_->M() != M_) throw InputError("oracle: hypothesis M differs from problem M");
    S_ = set_difference(A_, M_);
    if (static_cast<Index>(active().size()) > data.n()) {
        throw InputError("oracle: |M u S| exceeds n, the restricted fit is not identifiable");
    }
}

IndexSet OracleProblem::active() const {
    IndexSet out = set_union(M_, S_);
    if (data_->has_intercept()) out.insert(out.begin(), 0);
    return out;
}

IndexSet OracleProblem::inactive() const { return complement(active(), data_->num_coef()); }

namespace {

FitResult to_fit(const OracleProblem& problem, RestrictedNewtonResult&& rn) {
    FitResult fit;
    fit.beta = std::move(rn.beta);
    fit.multiplier = std::move(rn.multiplier);
    fit.iterations = rn.iterations;
    fit.objective_trace = std::move(rn.trace);
    fit.converged = true;
    for (Index j : problem.S()) {
        if (fit.beta(j) != 0.0) fit.support.push_back(j);
    }
    return fit;
}

}  // namespace

FitResult fit_oracle_full(const OracleProblem& problem, const NewtonOptions& options) {
    RestrictedNewtonProblem rp;
    rp.active = problem.active();
    return to_fit(problem, restricted_newton(problem.family(), problem.data(), rp, std::nullopt,
                                             options));
}

FitResult fit_oracle_reduced(const OracleProblem& problem, const NewtonOptions& options) {
    if (!problem.hypothesis()) throw InputError("reduced oracle needs a hypothesis");
    const HypothesisSpec& hyp = *problem.hypothesis();
    RestrictedNewtonProblem rp;
    rp.active = problem.active();
    rp.constrained = hyp.M();
    rp.C = hyp.C();
    rp.t = hyp.t();
    return to_fit(problem, restricted_newton(problem.family(), problem.data(), rp, std::nullopt,
                                             options));
}

EventReport check_lla_events(const OracleProblem& problem, const FitResult& oracle_fit,
                             const PenaltySpec& penalty, const Vec& beta_init,
                             const std::optional<Vec>& beta_star) {
    const double inf = std::numeric_limits<double>::infinity();
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const double lam = penalty.lambda;
    EventReport rep;
    rep.init_bound = penalty.a0() * lam;
    rep.gradient_bound = penalty.a1() * lam;
    rep.oracle_bound = penalty.a * lam;
    rep.signal_bound = (penalty.a + 1.0) * lam;
    rep.have_truth = beta_star.has_value();

    const Vec g = gradient(problem.family(), problem.data(), oracle_fit.beta);
    rep.gradient_max = 0.0;
    for (Index j : problem.inactive()) rep.gradient_max = std::max(rep.gradient_max, std::abs(g(j)));
    rep.gradient_ok = rep.gradient_max < rep.gradient_bound;

    rep.oracle_min = inf;
    for (Index j : problem.S()) rep.oracle_min = std::min(rep.oracle_min, std::abs(oracle_fit.beta(j)));
    rep.oracle_ok = rep.oracle_min > rep.oracle_bound;

    if (beta_star) {
        const Index first = problem.data().has_intercept() ? 1 : 0;
        rep.init_error = 0.0;
        for (Index j = first; j < beta_init.size(); ++j) {
            if (!set_contains(problem.M(), j)) {
                rep.init_error = std::max(rep.init_error, std::abs(beta_init(j) - (*beta_star)(j)));
            }
        }
        rep.init_ok = rep.init_error <= rep.init_bound;
        rep.signal_min = inf;
        for (Index j : problem.S()) rep.signal_min = std::min(rep.signal_min, std::abs((*beta_star)(j)));
        rep.signal_ok = rep.signal_min > rep.signal_bound;
    } else {
        rep.init_error = nan;
        rep.signal_min = nan;
    }
    return rep;
}

}  // namespace pplla
