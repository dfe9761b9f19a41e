#include "pplla/inference.hpp"

#include "pplla/chisq.hpp"
#include "pplla/newton.hpp"

#include <cmath>

namespace pplla {

std::string to_string(StatisticKind k) {
    switch (k) {
        case StatisticKind::wald: return "wald";
        case StatisticKind::score: return "score";
        case StatisticKind::lrt: return "lrt";
    }
    return "unknown";
}

IndexSet support_set(const Vec& beta, const IndexSet& M, bool has_intercept) {
    IndexSet out;
    for (Index j = has_intercept ? 1 : 0; j < beta.size(); ++j) {
        if (beta(j) != 0.0 && !set_contains(M, j)) out.push_back(j);
    }
    return out;
}

IndexSet inference_block(const Vec& beta, const IndexSet& M, bool has_intercept) {
    IndexSet out = set_union(M, support_set(beta, M, has_intercept));
    if (has_intercept) out.insert(out.begin(), 0);
    return out;
}

namespace {

void check_phi(double phi) {
    if (!(phi > 0.0) || !std::isfinite(phi)) {
        throw SolverError("dispersion estimate must be positive and finite");
    }
}

// [C 0] laid out over the coordinates of `block`.
Mat padded_constraint(const HypothesisSpec& hyp, const IndexSet& block) {
    Mat V = Mat::Zero(hyp.r(), static_cast<Index>(block.size()));
    for (std::size_t k = 0; k < hyp.M().size(); ++k) {
        auto it = std::lower_bound(block.begin(), block.end(), hyp.M()[k]);
        V.col(it - block.begin()) = hyp.C().col(static_cast<Index>(k));
    }
    return V;
}

Eigen::LLT<Mat> cholesky_or_throw(const Mat& A, const char* what) {
    Eigen::LLT<Mat> llt(A);
    if (llt.info() != Eigen::Success) throw SolverError(std::string("singular ") + what);
    return llt;
}

}  // namespace

double wald_statistic(const GlmFamily& family, const Dataset& data, const Vec& beta_full,
                      const HypothesisSpec& hyp, double phi_hat) {
    check_phi(phi_hat);
    hyp.check_against(data.num_coef(), data.has_intercept());
    const IndexSet block = inference_block(beta_full, hyp.M(), data.has_intercept());
    const Mat K = hessian_block(family, data, beta_full, block);
    const auto kllt = cholesky_or_throw(K, "K_n block for the Wald statistic");
    // C (n K)^{-1}_{MM} C' = W'W / n with W = L^{-1} [C 0]'.
    const Mat W = kllt.matrixL().solve(padded_constraint(hyp, block).transpose());
    const Mat middle = W.transpose() * W / static_cast<double>(data.n());
    const auto mllt = cholesky_or_throw(middle, "middle matrix C (nK)^-1_MM C' of the Wald statistic");
    const Vec h = hyp.C() * gather(beta_full, hyp.M()) - hyp.t();
    const Vec z = mllt.matrixL().solve(h);
    return z.squaredNorm() / phi_hat;
}

double score_statistic(const GlmFamily& family, const Dataset& data, const Vec& beta_reduced,
                       const HypothesisSpec& hyp, double phi_hat) {
    check_phi(phi_hat);
    hyp.check_against(data.num_coef(), data.has_intercept());
    const IndexSet block = inference_block(beta_reduced, hyp.M(), data.has_intercept());
    const Mat K = hessian_block(family, data, beta_reduced, block);
    const auto kllt = cholesky_or_throw(K, "K_n block for the score statistic");
    const Vec g = gather(gradient(family, data, beta_reduced), block);
    const Vec z = kllt.matrixL().solve(g);
    return static_cast<double>(data.n()) * z.squaredNorm() / phi_hat;
}

double lrt_statistic(const GlmFamily& family, const Dataset& data, const Vec& beta_full,
                     const Vec& beta_reduced, double phi_hat) {
    check_phi(phi_hat);
    const double n = static_cast<double>(data.n());
    return -2.0 * n * (loss(family, data, beta_full) - loss(family, data, beta_reduced)) / phi_hat;
}

DispersionEstimate dispersion_estimate(const GlmFamily& family, const Dataset& data,
                                       const Vec& beta, const IndexSet& M) {
    DispersionEstimate est;
    if (family.dispersion_known()) {
        est.value = 1.0;
        return est;
    }
    const Index s = static_cast<Index>(support_set(beta, M, data.has_intercept()).size());
    est.denominator = static_cast<double>(data.n() - s - static_cast<Index>(M.size()) - 1);
    if (!(est.denominator > 0.0)) {
        throw InputError("dispersion estimate: nonpositive denominator n - |S| - |M| - 1");
    }
    const double rss = (data.y() - data.design() * beta).squaredNorm();
    est.value = rss / est.denominator;
    est.degenerate = rss == 0.0;
    return est;
}

TestReport make_report(StatisticKind kind, double value, Index dof, double alpha, double phi_hat) {
    TestReport rep;
    rep.kind = kind;
    rep.value = value;
    rep.dof = dof;
    rep.alpha = alpha;
    rep.phi_hat = phi_hat;
    rep.critical_value = chisq_upper_quantile(alpha, static_cast<double>(dof));
    rep.p_value = value >= 0.0 ? 1.0 - central_chisq_cdf(value, static_cast<double>(dof)) : 1.0;
    rep.reject = value > rep.critical_value;
    rep.negative_statistic = value < 0.0;
    return rep;
}

std::array<TestReport, 3> test_from_fits(const GlmFamily& family, const Dataset& data,
                                         const HypothesisSpec& hyp, const Vec& beta_full,
                                         const Vec& beta_reduced, double alpha, double lambda_hat,
                                         double* phi_full, double* phi_reduced) {
    const DispersionEstimate pa = dispersion_estimate(family, data, beta_full, hyp.M());
    const DispersionEstimate p0 = dispersion_estimate(family, data, beta_reduced, hyp.M());
    if (phi_full) *phi_full = pa.value;
    if (phi_reduced) *phi_reduced = p0.value;

    const Index r = hyp.r();
    std::array<TestReport, 3> reps{
        make_report(StatisticKind::wald, wald_statistic(family, data, beta_full, hyp, pa.value), r,
                    alpha, pa.value),
        make_report(StatisticKind::score,
                    score_statistic(family, data, beta_reduced, hyp, p0.value), r, alpha, p0.value),
        make_report(StatisticKind::lrt,
                    lrt_statistic(family, data, beta_full, beta_reduced, pa.value), r, alpha,
                    pa.value)};
    const IndexSet sf = support_set(beta_full, hyp.M(), data.has_intercept());
    const IndexSet s0 = support_set(beta_reduced, hyp.M(), data.has_intercept());
    for (auto& rep : reps) {
        rep.support_full = sf;
        rep.support_reduced = s0;
        rep.lambda_hat = lambda_hat;
    }
    return reps;
}

namespace {

template <class F>
auto stage(const char* name, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const InputError& e) {
        throw InputError(std::string(name) + ": " + e.what());
    } catch (const SolverError& e) {
        throw SolverError(std::string(name) + ": " + e.what(), e.iteration());
    }
}

}  // namespace

TestOutcome run_test(const GlmFamily& family, const Dataset& data, const HypothesisSpec& hyp,
                     const TestConfig& config) {
    if (!(config.alpha > 0.0 && config.alpha < 1.0)) throw InputError("alpha must lie in (0, 1)");
    hyp.check_against(data.num_coef(), data.has_intercept());
    validate_response(family, data);
    PenaltySpec penalty{config.penalty, 1.0, config.penalty_a};
    penalty.validate();

    TestOutcome out;
    out.cv = stage("cross-validation", [&] { return cv_select(family, data, config.lasso); });
    out.warnings = out.cv.warnings;
    out.lambda_lasso = out.cv.lambda;
    out.beta_init = stage("lasso initializer", [&] {
        return fit_lasso(family, data, out.lambda_lasso, config.lasso.solver).beta;
    });

    std::optional<LlaResult> reduced;
    if (config.fixed_lambda) {
        out.lambda_hat = *config.fixed_lambda;
        if (!(out.lambda_hat > 0.0)) throw InputError("fixed lambda must be positive");
    } else {
        auto path = stage("reduced-model lambda path", [&] {
            const std::vector<double> grid =
                config.lla.lambda_grid.empty()
                    ? lla_lambda_grid(family, data, hyp, config.lla.grid_size, config.lla.grid_ratio)
                    : config.lla.lambda_grid;
            return lla_reduced_path(family, data, hyp, penalty, out.beta_init, grid, config.lla);
        });
        std::vector<std::pair<double, FitResult>> fits;
        fits.reserve(path.size());
        for (const auto& [lam, res] : path) fits.emplace_back(lam, res.fit);
        out.gic = gic_select(family, data, fits);
        out.lambda_hat = out.gic->lambda;
        reduced = std::move(path[out.gic->index].second);
    }
    const PenaltySpec pen_hat = penalty.with_lambda(out.lambda_hat);
    if (!reduced) {
        reduced = stage("reduced-model LLA", [&] {
            return lla_reduced(family, data, hyp, pen_hat, out.beta_init, config.lla);
        });
    }
    out.fit_reduced = reduced->fit;
    out.fit_full = stage("full-model LLA", [&] {
        return lla_full(family, data, hyp.M(), pen_hat, out.beta_init, config.lla).fit;
    });

    out.reports = stage("test statistics", [&] {
        return test_from_fits(family, data, hyp, out.fit_full.beta, out.fit_reduced.beta,
                              config.alpha, out.lambda_hat, &out.phi_full, &out.phi_reduced);
    });
    if (out.reports[2].negative_statistic) {
        out.warnings.push_back("likelihood ratio statistic is negative; full and reduced supports differ");
    }
    return out;
}

FitOutcome fit_model(const GlmFamily& family, const Dataset& data, const TestConfig& config) {
    validate_response(family, data);
    PenaltySpec penalty{config.penalty, 1.0, config.penalty_a};
    penalty.validate();

    FitOutcome out;
    out.cv = stage("cross-validation", [&] { return cv_select(family, data, config.lasso); });
    out.warnings = out.cv.warnings;
    out.lambda_lasso = out.cv.lambda;
    out.beta_init = stage("lasso initializer", [&] {
        return fit_lasso(family, data, out.lambda_lasso, config.lasso.solver).beta;
    });
    const IndexSet none;
    if (config.fixed_lambda) {
        out.lambda_hat = *config.fixed_lambda;
        if (!(out.lambda_hat > 0.0)) throw InputError("fixed lambda must be positive");
        out.fit = stage("LLA", [&] {
            return lla_full(family, data, none, penalty.with_lambda(out.lambda_hat), out.beta_init,
                            config.lla).fit;
        });
        return out;
    }
    std::vector<std::pair<double, FitResult>> fits = stage("lambda path", [&] {
        const std::vector<double> grid =
            config.lla.lambda_grid.empty()
                ? log_grid(lasso_lambda_max(family, data), config.lla.grid_size, config.lla.grid_ratio)
                : config.lla.lambda_grid;
        std::vector<std::pair<double, FitResult>> path;
        std::optional<AdmmState> warm;
        for (double lam : grid) {
            LlaResult res =
                lla_full(family, data, none, penalty.with_lambda(lam), out.beta_init, config.lla, warm);
            warm = res.admm_state;
            warm->beta = out.beta_init;
            path.emplace_back(lam, std::move(res.fit));
        }
        return path;
    });
    out.gic = gic_select(family, data, fits);
    out.lambda_hat = out.gic->lambda;
    out.fit = fits[out.gic->index].second;
    return out;
}

NoncentralParams noncentral_params(const GlmFamily& family, const Dataset& data,
                                   const Vec& beta_star, const HypothesisSpec& hyp, double phi_star,
                                   const IndexSet& support_star) {
    check_phi(phi_star);
    hyp.check_against(data.num_coef(), data.has_intercept());
    IndexSet block = set_union(hyp.M(), set_difference(support_star, hyp.M()));
    if (data.has_intercept() && (block.empty() || block.front() != 0)) block.insert(block.begin(), 0);
    const Mat K = hessian_block(family, data, beta_star, block);
    const auto kllt = cholesky_or_throw(K, "K_n at the true coefficients");
    const Mat W = kllt.matrixL().solve(padded_constraint(hyp, block).transpose());
    NoncentralParams out;
    out.Psi = W.transpose() * W;
    out.h = hyp.C() * gather(beta_star, hyp.M()) - hyp.t();
    const auto pllt = cholesky_or_throw(out.Psi, "Psi");
    out.nu = static_cast<double>(data.n()) * pllt.matrixL().solve(out.h).squaredNorm() / phi_star;
    return out;
}

double power_approx(const GlmFamily& family, const Dataset& data, const Vec& beta_star,
                    const HypothesisSpec& hyp, double phi_star, const IndexSet& support_star,
                    double alpha) {
    const NoncentralParams params =
        noncentral_params(family, data, beta_star, hyp, phi_star, support_star);
    const double r = static_cast<double>(hyp.r());
    const double q = chisq_upper_quantile(alpha, r);
    return 1.0 - noncentral_chisq_cdf(q, r, params.nu);
}

}  // namespace pplla
