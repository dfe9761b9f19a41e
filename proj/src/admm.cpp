#include "pplla/admm.hpp"

#include "pplla/hypothesis.hpp"
#include "pplla/lasso.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pplla {

ConstrainedWLassoProblem::ConstrainedWLassoProblem(GlmFamily family, const Dataset& data,
                                                   IndexSet M, Mat C, Vec t, Vec weights)
    : family_(family), data_(&data), M_(std::move(M)), C_(std::move(C)), t_(std::move(t)),
      weights_(std::move(weights)) {
    const Index d = data.num_coef();
    for (Index j : M_) {
        if (j < (data.has_intercept() ? 1 : 0) || j >= d) {
            throw InputError("ADMM problem: tested index out of range");
        }
    }
    if (C_.rows() > 0) {
        if (C_.cols() != static_cast<Index>(M_.size())) {
            throw InputError("ADMM problem: C must have |M| columns");
        }
        if (t_.size() != C_.rows()) throw InputError("ADMM problem: t must have one entry per row of C");
        if (matrix_rank(C_) != C_.rows()) throw InputError("constraint matrix rank deficient");
    } else {
        C_.resize(0, static_cast<Index>(M_.size()));
        t_.resize(0);
    }
    unpenalized_ = M_;
    if (data.has_intercept()) unpenalized_.insert(unpenalized_.begin(), 0);
    penalized_ = complement(unpenalized_, d);
    if (weights_.size() != static_cast<Index>(penalized_.size())) {
        throw InputError("ADMM problem: expected " + std::to_string(penalized_.size()) +
                         " weights, got " + std::to_string(weights_.size()));
    }
    if ((weights_.array() < 0.0).any() || !weights_.allFinite()) {
        throw InputError("ADMM problem: weights must be finite and nonnegative");
    }
}

Vec ConstrainedWLassoProblem::constraint_value(const Vec& beta) const {
    if (r() == 0) return Vec(0);
    return C_ * gather(beta, M_);
}

double ConstrainedWLassoProblem::objective(const Vec& beta) const {
    return loss(family_, *data_, beta) + weights_.dot(penalized_part(beta).cwiseAbs());
}

AdmmState initial_state(const ConstrainedWLassoProblem& problem, const AdmmConfig& config,
                        const std::optional<Vec>& start) {
    AdmmState s;
    s.beta = start ? *start : Vec::Zero(problem.data().num_coef());
    s.eta = problem.penalized_part(s.beta);
    s.nu1 = Vec::Zero(problem.r());
    s.nu2 = Vec::Zero(problem.num_penalized());
    s.rho = config.rho;
    s.k = 0;
    return s;
}

AdmmWorkspace::AdmmWorkspace(const ConstrainedWLassoProblem& problem) : problem_(&problem) {
    const Index d = problem.data().num_coef();
    coupling_ = Mat::Zero(d, d);
    const IndexSet& M = problem.M();
    if (problem.r() > 0) {
        const Mat CtC = problem.C().transpose() * problem.C();
        for (std::size_t a = 0; a < M.size(); ++a) {
            for (std::size_t b = 0; b < M.size(); ++b) {
                coupling_(M[a], M[b]) += CtC(static_cast<Index>(a), static_cast<Index>(b));
            }
        }
    }
    for (Index j : problem.penalized()) coupling_(j, j) += 1.0;
    if (problem.family().kind == Family::gaussian) {
        const Mat& Z = problem.data().design();
        const double n = static_cast<double>(Z.rows());
        gram_ = Z.transpose() * Z / n;
        zy_ = Z.transpose() * problem.data().y() / n;
    }
}

const Eigen::LLT<Mat>& AdmmWorkspace::gaussian_factor(double rho) {
    if (rho != factored_rho_) {
        factor_ = robust_cholesky(gram_ + rho * coupling_, 1e-8, "ADMM beta-update system");
        factored_rho_ = rho;
    }
    return factor_;
}

namespace {

// rho * (C~'(t - nu1/rho) + E_P'(eta - nu2/rho)): the linear term of the beta-update.
Vec coupling_target(const AdmmState& s, const ConstrainedWLassoProblem& problem) {
    Vec q = Vec::Zero(problem.data().num_coef());
    if (problem.r() > 0) {
        const Vec cm = problem.C().transpose() * (s.rho * problem.t() - s.nu1);
        const IndexSet& M = problem.M();
        for (std::size_t a = 0; a < M.size(); ++a) q(M[a]) += cm(static_cast<Index>(a));
    }
    const IndexSet& P = problem.penalized();
    for (std::size_t k = 0; k < P.size(); ++k) {
        const Index kk = static_cast<Index>(k);
        q(P[k]) += s.rho * s.eta(kk) - s.nu2(kk);
    }
    return q;
}

}  // namespace

Vec beta_update(const AdmmState& state, const ConstrainedWLassoProblem& problem,
                const AdmmConfig& config, AdmmWorkspace& workspace,
                std::vector<double>* newton_trace) {
    const Vec q = coupling_target(state, problem);
    const Mat& Q = workspace.coupling();
    const double rho = state.rho;

    if (problem.family().kind == Family::gaussian) {
        const Vec beta = workspace.gaussian_factor(rho).solve(workspace.zy() + q);
        if (newton_trace) {
            newton_trace->push_back(loss(problem.family(), problem.data(), beta) +
                                    0.5 * rho * beta.dot(Q * beta) - q.dot(beta));
        }
        return beta;
    }

    const GlmFamily& fam = problem.family();
    const Mat& Z = problem.data().design();
    const Vec& y = problem.data().y();
    const double n = static_cast<double>(Z.rows());

    auto objective = [&](const Vec& b, const Vec& theta) {
        return loss_from_predictor(fam, y, theta) + 0.5 * rho * b.dot(Q * b) - q.dot(b);
    };

    Vec beta = state.beta;
    Vec theta = Z * beta;
    double f = objective(beta, theta);
    if (newton_trace) newton_trace->push_back(f);
    for (int it = 0; it < config.newton_max; ++it) {
        const Vec g = -(Z.transpose() * (y - mean_response(fam, theta))) / n + rho * (Q * beta) - q;
        if (g.lpNorm<Eigen::Infinity>() < config.newton_tol) return beta;
        const Mat Zw = variance_weights(fam, theta).cwiseSqrt().asDiagonal() * Z;
        Mat H = rho * Q;
        H.selfadjointView<Eigen::Lower>().rankUpdate(Zw.transpose(), 1.0 / n);
        H.triangularView<Eigen::StrictlyUpper>() = H.transpose();
        Vec step;
        try {
            step = -robust_cholesky(H, 1e-8, "ADMM beta-update Newton system").solve(g);
        } catch (const SolverError& e) {
            throw SolverError(std::string(e.what()) + " (ADMM iteration " +
                                  std::to_string(state.k) + ", Newton step " + std::to_string(it) + ")",
                              state.k);
        }
        const double slope = g.dot(step);
        if (!(slope < 0.0)) return beta;
        double s = 1.0;
        Vec cand = beta + step;
        Vec cand_theta = Z * cand;
        double fc = objective(cand, cand_theta);
        int halvings = 0;
        const double slack = 64.0 * std::numeric_limits<double>::epsilon() * std::abs(f);
        while (!(fc <= f + 1e-4 * s * slope + slack) && halvings < 60) {
            s *= 0.5;
            cand = beta + s * step;
            cand_theta = Z * cand;
            fc = objective(cand, cand_theta);
            ++halvings;
        }
        if (halvings == 60) {
            // Stalled at round-off level.
            if (g.lpNorm<Eigen::Infinity>() < std::sqrt(config.newton_tol)) return beta;
            throw SolverError("ADMM beta-update line search failed (ADMM iteration " +
                                  std::to_string(state.k) + ", Newton step " + std::to_string(it) + ")",
                              state.k);
        }
        beta = std::move(cand);
        theta = std::move(cand_theta);
        f = fc;
        if (newton_trace) newton_trace->push_back(f);
    }
    const Vec g = -(Z.transpose() * (y - mean_response(fam, theta))) / n + rho * (Q * beta) - q;
    if (g.lpNorm<Eigen::Infinity>() < std::sqrt(config.newton_tol)) return beta;
    throw SolverError("ADMM beta-update Newton did not converge (ADMM iteration " +
                          std::to_string(state.k) + ")",
                      state.k);
}

Vec eta_update(const AdmmState& state, const ConstrainedWLassoProblem& problem) {
    const IndexSet& P = problem.penalized();
    Vec eta(static_cast<Index>(P.size()));
    for (std::size_t k = 0; k < P.size(); ++k) {
        const Index kk = static_cast<Index>(k);
        eta(kk) = soft_threshold(state.beta(P[k]) + state.nu2(kk) / state.rho,
                                 problem.weights()(kk) / state.rho);
    }
    return eta;
}

void dual_update(AdmmState& state, const ConstrainedWLassoProblem& problem) {
    if (problem.r() > 0) state.nu1 += state.rho * (problem.constraint_value(state.beta) - problem.t());
    state.nu2 += state.rho * (problem.penalized_part(state.beta) - state.eta);
}

double KktResiduals::max() const { return std::max({tested, zero, active, feasibility}); }

KktResiduals kkt_residuals(const ConstrainedWLassoProblem& problem, const Vec& beta) {
    KktResiduals res;
    const Vec g = gradient(problem.family(), problem.data(), beta);
    Vec gM = gather(g, problem.M());
    if (problem.r() > 0) {
        const Mat& C = problem.C();
        const Vec nu = (C * C.transpose()).llt().solve(C * gM);
        gM -= C.transpose() * nu;
        res.feasibility = (problem.constraint_value(beta) - problem.t()).norm();
    }
    res.tested = gM.size() ? gM.lpNorm<Eigen::Infinity>() : 0.0;
    if (problem.data().has_intercept()) res.tested = std::max(res.tested, std::abs(g(0)));
    const IndexSet& P = problem.penalized();
    for (std::size_t k = 0; k < P.size(); ++k) {
        const double w = problem.weights()(static_cast<Index>(k));
        const double gj = g(P[k]);
        const double bj = beta(P[k]);
        if (bj == 0.0) {
            res.zero = std::max(res.zero, std::abs(gj) - w);
        } else {
            res.active = std::max(res.active, std::abs(gj + w * (bj > 0 ? 1.0 : -1.0)));
        }
    }
    return res;
}

namespace {

// Re-solves the smooth problem on the support found by ADMM with the signs fixed.
// Accepted only when the result is sign-consistent and satisfies the zero-coordinate
// optimality conditions, in which case it is the exact weighted-lasso solution.
std::optional<Vec> polish(const ConstrainedWLassoProblem& problem, const Vec& eta,
                          const AdmmConfig& config, double kkt_tol) {
    const IndexSet& P = problem.penalized();
    IndexSet active = problem.unpenalized();
    IndexSet support;
    for (std::size_t k = 0; k < P.size(); ++k) {
        if (eta(static_cast<Index>(k)) != 0.0) support.push_back(P[k]);
    }
    active = set_union(active, support);

    RestrictedNewtonProblem rp;
    rp.active = active;
    rp.linear = Vec::Zero(static_cast<Index>(active.size()));
    for (std::size_t a = 0; a < active.size(); ++a) {
        auto it = std::lower_bound(P.begin(), P.end(), active[a]);
        if (it != P.end() && *it == active[a]) {
            const Index k = it - P.begin();
            const double e = eta(k);
            rp.linear(static_cast<Index>(a)) = problem.weights()(k) * (e > 0 ? 1.0 : -1.0);
        }
    }
    rp.constrained = problem.M();
    rp.C = problem.C();
    rp.t = problem.t();

    NewtonOptions opts;
    opts.tol = std::min(config.newton_tol, 1e-10);
    opts.max_iter = std::max(config.newton_max, 50);

    RestrictedNewtonResult rn;
    try {
        rn = restricted_newton(problem.family(), problem.data(), rp, std::nullopt, opts);
    } catch (const SolverError&) {
        return std::nullopt;
    }
    const Vec& b = rn.beta;
    for (std::size_t k = 0; k < P.size(); ++k) {
        const Index kk = static_cast<Index>(k);
        const double e = eta(kk);
        const double w = problem.weights()(kk);
        if (e != 0.0 && w > 0.0 && (b(P[k]) == 0.0 || (b(P[k]) > 0) != (e > 0))) return std::nullopt;
    }
    const KktResiduals kkt = kkt_residuals(problem, b);
    if (kkt.max() > kkt_tol) return std::nullopt;
    return b;
}

}  // namespace

AdmmSolution solve(const ConstrainedWLassoProblem& problem, const AdmmConfig& config,
                   const std::optional<AdmmState>& warm) {
    if (!(config.rho > 0.0) || !(config.tol_primal > 0.0) || !(config.tol_dual > 0.0) ||
        !(config.tol_relative >= 0.0) || !(config.newton_tol > 0.0)) {
        throw InputError("ADMM tolerances and rho must be positive");
    }
    AdmmState s = warm ? *warm : initial_state(problem, config);
    if (s.beta.size() != problem.data().num_coef() || s.eta.size() != problem.num_penalized() ||
        s.nu1.size() != problem.r() || s.nu2.size() != problem.num_penalized()) {
        throw InputError("ADMM warm start has inconsistent dimensions");
    }
    if (!(s.rho > 0.0)) s.rho = config.rho;

    AdmmWorkspace ws(problem);
    AdmmDiagnostics diag;
    const double sqrt_r = std::sqrt(static_cast<double>(std::max<Index>(problem.r(), 1)));
    const double sqrt_p = std::sqrt(static_cast<double>(std::max<Index>(problem.num_penalized(), 1)));

    bool converged = false;
    const int adapt_until = config.max_iter / 2;
    AdmmConfig inner = config;
    for (int it = 0; it < config.max_iter; ++it) {
        ++s.k;
        if (it > 0) {
            // Inexact beta-updates: Newton accuracy tracks the current residuals.
            const double level = std::min(diag.primal_residual.back(), diag.dual_residual.back());
            inner.newton_tol = std::max(config.newton_tol, 1e-2 * level);
        }
        s.beta = beta_update(s, problem, inner, ws);
        const Vec eta_prev = s.eta;
        s.eta = eta_update(s, problem);
        dual_update(s, problem);

        const Vec cb = problem.constraint_value(s.beta);
        const Vec bp = problem.penalized_part(s.beta);
        const double r1 = problem.r() ? (cb - problem.t()).norm() : 0.0;
        const double r2 = (bp - s.eta).norm();
        const double dual = s.rho * (s.eta - eta_prev).norm();
        const double primal = std::hypot(r1, r2);
        diag.primal_residual.push_back(primal);
        diag.dual_residual.push_back(dual);

        const double eps1 = sqrt_r * config.tol_primal +
                            config.tol_relative * std::max(cb.norm(), problem.t().norm());
        const double eps2 = sqrt_p * config.tol_primal +
                            config.tol_relative * std::max(bp.norm(), s.eta.norm());
        const double eps_d = sqrt_p * config.tol_dual + config.tol_relative * s.nu2.norm();
        if (r1 <= eps1 && r2 <= eps2 && dual <= eps_d) {
            converged = true;
            break;
        }

        if (config.adaptive_rho && it < adapt_until && it % 5 == 4) {
            // Unscaled duals are stored, so no rescaling is needed when rho moves.
            if (primal > 10.0 * dual) {
                s.rho *= 2.0;
                ++diag.rho_changes;
            } else if (dual > 10.0 * primal) {
                s.rho *= 0.5;
                ++diag.rho_changes;
            }
        }
    }
    diag.iterations = s.k - (warm ? warm->k : 0);
    diag.final_rho = s.rho;
    if (!converged) {
        const double pr = diag.primal_residual.empty() ? 0.0 : diag.primal_residual.back();
        const double du = diag.dual_residual.empty() ? 0.0 : diag.dual_residual.back();
        throw AdmmNotConverged("ADMM did not converge in " + std::to_string(config.max_iter) +
                                   " iterations (primal " + std::to_string(pr) + ", dual " +
                                   std::to_string(du) + ")",
                               s.k, std::move(diag));
    }

    Vec beta = s.beta;
    scatter(beta, problem.penalized(), s.eta);

    if (config.polish) {
        const double kkt_tol = 10.0 * std::max(config.tol_primal, config.tol_dual);
        if (auto refined = polish(problem, s.eta, config, kkt_tol)) {
            beta = std::move(*refined);
            diag.polished = true;
        }
    }

    AdmmSolution out;
    out.fit.beta = std::move(beta);
    for (Index j : problem.penalized()) {
        if (out.fit.beta(j) != 0.0) out.fit.support.push_back(j);
    }
    out.fit.iterations = diag.iterations;
    out.fit.converged = true;
    out.fit.objective_trace.push_back(problem.objective(out.fit.beta));
    if (problem.r() > 0) {
        const Mat& C = problem.C();
        const Vec gM = gather(gradient(problem.family(), problem.data(), out.fit.beta), problem.M());
        out.fit.multiplier = (C * C.transpose()).llt().solve(C * gM);
    }
    out.state = std::move(s);
    out.diagnostics = std::move(diag);
    return out;
}

}  // namespace pplla
