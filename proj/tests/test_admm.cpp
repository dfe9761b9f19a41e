#include "helpers.hpp"
#include "pplla/admm.hpp"
#include "pplla/lasso.hpp"

#include <doctest.h>

using namespace pplla;
using namespace testing;

namespace {

// Independent optimality check of the constrained weighted lasso.
double kkt_violation(const GlmFamily& f, const Dataset& d, const IndexSet& M, const Mat& C,
                     const Vec& t, const Vec& w, const Vec& beta) {
    const Vec g = gradient(f, d, beta);
    double worst = 0.0;
    const Vec gM = gather(g, M);
    if (C.rows() > 0) {
        const Vec nu = C.transpose().colPivHouseholderQr().solve(gM);
        worst = std::max(worst, (gM - C.transpose() * nu).lpNorm<Eigen::Infinity>());
        worst = std::max(worst, (C * gather(beta, M) - t).norm());
    } else if (!M.empty()) {
        worst = std::max(worst, gM.lpNorm<Eigen::Infinity>());
    }
    if (d.has_intercept()) worst = std::max(worst, std::abs(g(0)));
    IndexSet unpen = M;
    if (d.has_intercept()) unpen.insert(unpen.begin(), 0);
    const IndexSet P = complement(unpen, d.num_coef());
    for (std::size_t k = 0; k < P.size(); ++k) {
        const Index j = P[k];
        const double wj = w(static_cast<Index>(k));
        if (beta(j) == 0.0) {
            worst = std::max(worst, std::abs(g(j)) - wj);
        } else {
            worst = std::max(worst, std::abs(g(j) + wj * (beta(j) > 0 ? 1.0 : -1.0)));
        }
    }
    return worst;
}

Mat pad(const Mat& C, const IndexSet& M, Index d) {
    Mat out = Mat::Zero(C.rows(), d);
    for (std::size_t k = 0; k < M.size(); ++k) out.col(M[k]) = C.col(static_cast<Index>(k));
    return out;
}

}  // namespace

TEST_CASE("zero weights without constraints give least squares") {
    std::mt19937_64 gen(21);
    const Mat X = random_matrix(100, 8, gen);
    const Vec y = X * random_vector(8, gen) + random_vector(100, gen);
    const Dataset d(X, y);
    const ConstrainedWLassoProblem prob({Family::gaussian}, d, {0, 1}, Mat(0, 2), Vec(0), Vec::Zero(6));
    const auto sol = solve(prob);
    const Vec ols = (X.transpose() * X).ldlt().solve(X.transpose() * y);
    CHECK((sol.fit.beta - ols).norm() < 1e-6);
}

TEST_CASE("gaussian constrained solve matches the KKT linear system") {
    std::mt19937_64 gen(22);
    for (int rep = 0; rep < 5; ++rep) {
        const Index n = 80, p = 7;
        const Mat X = random_matrix(n, p, gen);
        const Vec y = X * random_vector(p, gen) + random_vector(n, gen);
        const Dataset d(X, y);
        const IndexSet M{1, 2, 4};
        const Mat C = random_matrix(2, 3, gen);
        const Vec t = random_vector(2, gen);
        const ConstrainedWLassoProblem prob({Family::gaussian}, d, M, C, t, Vec::Zero(4));
        const auto sol = solve(prob);

        Mat K = Mat::Zero(p + 2, p + 2);
        K.topLeftCorner(p, p) = X.transpose() * X / static_cast<double>(n);
        const Mat Cp = pad(C, M, p);
        K.topRightCorner(p, 2) = Cp.transpose();
        K.bottomLeftCorner(2, p) = Cp;
        Vec rhs(p + 2);
        rhs << X.transpose() * y / static_cast<double>(n), t;
        const Vec direct = K.fullPivLu().solve(rhs).head(p);
        CHECK((sol.fit.beta - direct).lpNorm<Eigen::Infinity>() < 1e-6);
    }
}

TEST_CASE("identity constraint pins the tested block") {
    std::mt19937_64 gen(23);
    for (Family fam : {Family::gaussian, Family::logistic}) {
        const Dataset d = random_dataset(fam, 90, 10, gen);
        const IndexSet M{2, 5};
        const Vec t = random_vector(2, gen, 0.5);
        const ConstrainedWLassoProblem prob({fam}, d, M, Mat::Identity(2, 2), t,
                                            Vec::Constant(8, 0.05));
        const auto sol = solve(prob);
        CHECK((gather(sol.fit.beta, M) - t).norm() < 1e-8);
    }
}

TEST_CASE("constant weights reproduce the lasso objective") {
    std::mt19937_64 gen(24);
    const Dataset d = random_dataset(Family::gaussian, 70, 12, gen, false, 0.5);
    const double lam = 0.1;
    const ConstrainedWLassoProblem prob({Family::gaussian}, d, {}, Mat(0, 0), Vec(0),
                                        Vec::Constant(12, lam));
    const auto sol = solve(prob);
    const FitResult lasso = fit_lasso({Family::gaussian}, d, lam);
    const double f_admm = prob.objective(sol.fit.beta);
    const double f_lasso = loss({Family::gaussian}, d, lasso.beta) + lam * lasso.beta.lpNorm<1>();
    CHECK(std::abs(f_admm - f_lasso) < 1e-5);
}

TEST_CASE("KKT residuals are small on random constrained problems") {
    std::mt19937_64 gen(25);
    std::uniform_real_distribution<double> u(0.0, 0.2);
    const AdmmConfig cfg;
    const double tol = 10.0 * std::max(cfg.tol_primal, cfg.tol_dual);
    for (int rep = 0; rep < 20; ++rep) {
        const Family fam = rep % 3 == 0 ? Family::logistic : (rep % 3 == 1 ? Family::gaussian : Family::poisson);
        const bool intercept = rep % 2 == 1;
        const Dataset d = random_dataset(fam, 80, 15, gen, intercept, 0.25);
        const Index off = intercept ? 1 : 0;
        const IndexSet M{off, off + 3, off + 6};
        const Index r = 1 + rep % 2;
        const Mat C = random_matrix(r, 3, gen);
        const Vec t = random_vector(r, gen, 0.2);
        Vec w(12);
        for (Index j = 0; j < 12; ++j) w(j) = u(gen);
        const ConstrainedWLassoProblem prob({fam}, d, M, C, t, w);
        const auto sol = solve(prob);
        CHECK(kkt_residuals(prob, sol.fit.beta).max() <= tol);
        CHECK(kkt_violation({fam}, d, M, C, t, w, sol.fit.beta) <= tol);
    }
}

TEST_CASE("gaussian beta-update is stationary") {
    std::mt19937_64 gen(26);
    const Dataset d = random_dataset(Family::gaussian, 50, 6, gen);
    const IndexSet M{0, 1};
    Mat C(1, 2);
    C << 1, 1;
    const Vec t = Vec::Constant(1, 0.3);
    const ConstrainedWLassoProblem prob({Family::gaussian}, d, M, C, t, Vec::Constant(4, 0.1));
    AdmmConfig cfg;
    AdmmState s = initial_state(prob, cfg);
    s.rho = 2.5;
    s.eta = random_vector(4, gen);
    s.nu1 = random_vector(1, gen);
    s.nu2 = random_vector(4, gen);
    AdmmWorkspace ws(prob);
    const Vec b = beta_update(s, prob, cfg, ws);
    const Mat Cp = pad(C, M, 6);
    Vec g = gradient({Family::gaussian}, d, b) + s.rho * Cp.transpose() * (Cp * b - t + s.nu1 / s.rho);
    const IndexSet P = prob.penalized();
    const Vec pen = gather(b, P) - s.eta + s.nu2 / s.rho;
    for (std::size_t k = 0; k < P.size(); ++k) g(P[k]) += s.rho * pen(static_cast<Index>(k));
    CHECK(g.norm() < cfg.newton_tol);
}

TEST_CASE("logistic beta-update Newton steps decrease the objective") {
    std::mt19937_64 gen(27);
    const Dataset d = random_dataset(Family::logistic, 60, 10, gen, false, 0.8);
    const ConstrainedWLassoProblem prob({Family::logistic}, d, {0}, Mat::Ones(1, 1), Vec::Zero(1),
                                        Vec::Constant(9, 0.05));
    AdmmConfig cfg;
    AdmmState s = initial_state(prob, cfg);
    s.eta = random_vector(9, gen);
    s.nu2 = random_vector(9, gen, 0.1);
    AdmmWorkspace ws(prob);
    std::vector<double> trace;
    beta_update(s, prob, cfg, ws, &trace);
    REQUIRE(trace.size() >= 2);
    for (std::size_t k = 1; k < trace.size(); ++k) CHECK(trace[k] <= trace[k - 1]);
}

TEST_CASE("huge rho enforces the shifted constraint") {
    std::mt19937_64 gen(28);
    const Dataset d = random_dataset(Family::gaussian, 50, 6, gen);
    Mat C(1, 2);
    C << 1, -2;
    const Vec t = Vec::Constant(1, 0.7);
    const ConstrainedWLassoProblem prob({Family::gaussian}, d, {1, 3}, C, t, Vec::Constant(4, 0.1));
    AdmmConfig cfg;
    AdmmState s = initial_state(prob, cfg);
    s.rho = 1e8;
    s.nu1 = Vec::Constant(1, 3e7);
    AdmmWorkspace ws(prob);
    const Vec b = beta_update(s, prob, cfg, ws);
    CHECK((prob.constraint_value(b) - (t - s.nu1 / s.rho)).norm() < 1e-3);
}

TEST_CASE("eta-update soft-thresholds") {
    std::mt19937_64 gen(29);
    const Dataset d = random_dataset(Family::gaussian, 20, 3, gen);
    Vec w(3);
    w << 0.3, 0.5, 0.7;
    const ConstrainedWLassoProblem prob({Family::gaussian}, d, {}, Mat(0, 0), Vec(0), w);
    AdmmState s = initial_state(prob, {});
    s.rho = 1.0;
    s.beta << 1.0, -0.2, 0.0;
    s.nu2.setZero();
    const Vec eta = eta_update(s, prob);
    CHECK(eta(0) == doctest::Approx(0.7));
    CHECK(eta(1) == 0.0);
    CHECK(eta(2) == 0.0);
}

TEST_CASE("dual update increments by rho times the residual") {
    std::mt19937_64 gen(30);
    const Dataset d = random_dataset(Family::gaussian, 40, 5, gen);
    Mat C(1, 2);
    C << 1, 1;
    const ConstrainedWLassoProblem prob({Family::gaussian}, d, {0, 2}, C, Vec::Constant(1, 0.5),
                                        Vec::Constant(3, 0.1));
    AdmmConfig cfg;
    AdmmState s = initial_state(prob, cfg);
    s.rho = 1.7;
    AdmmWorkspace ws(prob);
    for (int k = 0; k < 5; ++k) {
        s.beta = beta_update(s, prob, cfg, ws);
        s.eta = eta_update(s, prob);
        const Vec nu1 = s.nu1, nu2 = s.nu2;
        dual_update(s, prob);
        CHECK((s.nu1 - nu1 - s.rho * (prob.constraint_value(s.beta) - prob.t())).norm() < 1e-14);
        CHECK((s.nu2 - nu2 - s.rho * (prob.penalized_part(s.beta) - s.eta)).norm() < 1e-14);
    }
}

TEST_CASE("problem validation") {
    std::mt19937_64 gen(31);
    const Dataset d = random_dataset(Family::gaussian, 20, 4, gen, true);
    CHECK_THROWS_AS(ConstrainedWLassoProblem({Family::gaussian}, d, {0}, Mat::Ones(1, 1), Vec::Zero(1),
                                             Vec::Zero(3)),
                    InputError);
    CHECK_THROWS_AS(ConstrainedWLassoProblem({Family::gaussian}, d, {1}, Mat::Ones(1, 1), Vec::Zero(1),
                                             Vec::Zero(2)),
                    InputError);
    CHECK_THROWS_AS(ConstrainedWLassoProblem({Family::gaussian}, d, {1}, Mat::Ones(1, 1), Vec::Zero(1),
                                             Vec::Constant(3, -1.0)),
                    InputError);
    Mat C(2, 2);
    C << 1, 1, 2, 2;
    CHECK_THROWS_AS(ConstrainedWLassoProblem({Family::gaussian}, d, {1, 2}, C, Vec::Zero(2), Vec::Zero(2)),
                    InputError);
}

TEST_CASE("non-convergence reports diagnostics") {
    std::mt19937_64 gen(32);
    const Dataset d = random_dataset(Family::logistic, 50, 10, gen);
    const ConstrainedWLassoProblem prob({Family::logistic}, d, {0}, Mat::Ones(1, 1), Vec::Zero(1),
                                        Vec::Constant(9, 0.01));
    AdmmConfig cfg;
    cfg.max_iter = 3;
    try {
        solve(prob, cfg);
        FAIL("expected AdmmNotConverged");
    } catch (const AdmmNotConverged& e) {
        CHECK(e.diagnostics().primal_residual.size() == 3);
        CHECK(e.iteration() == 3);
    }
}

TEST_CASE("support is read from eta") {
    std::mt19937_64 gen(33);
    const Dataset d = random_dataset(Family::gaussian, 60, 10, gen, false, 0.4);
    AdmmConfig cfg;
    cfg.polish = false;
    const ConstrainedWLassoProblem prob({Family::gaussian}, d, {0}, Mat::Ones(1, 1), Vec::Zero(1),
                                        Vec::Constant(9, 0.15));
    const auto sol = solve(prob, cfg);
    const Vec bp = prob.penalized_part(sol.fit.beta);
    CHECK(bp == sol.state.eta);
    for (std::size_t k = 0; k < prob.penalized().size(); ++k) {
        const bool in_support = std::find(sol.fit.support.begin(), sol.fit.support.end(),
                                          prob.penalized()[k]) != sol.fit.support.end();
        CHECK(in_support == (sol.state.eta(static_cast<Index>(k)) != 0.0));
    }
}
