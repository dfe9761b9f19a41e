#include "helpers.hpp"
#include "pplla/lasso.hpp"
#include "pplla/sim.hpp"

#include <doctest.h>

using namespace pplla;
using namespace testing;

namespace {

// X with X'X / n = I exactly.
Mat orthonormal_design(Index n, Index p, std::mt19937_64& gen) {
    const Mat A = random_matrix(n, p, gen);
    Eigen::HouseholderQR<Mat> qr(A);
    return std::sqrt(static_cast<double>(n)) * Mat(qr.householderQ() * Mat::Identity(n, p));
}

}  // namespace

TEST_CASE("soft-threshold operator") {
    CHECK(soft_threshold(0.0, 0.4) == 0.0);
    CHECK(soft_threshold(1.0, 0.3) == doctest::Approx(0.7));
    CHECK(soft_threshold(-0.2, 0.5) == 0.0);
    CHECK(soft_threshold(-2.0, 0.5) == -1.5);
}

TEST_CASE("orthonormal design reduces to soft-thresholding") {
    std::mt19937_64 gen(11);
    const Index n = 60, p = 8;
    const Mat X = orthonormal_design(n, p, gen);
    Vec beta(p);
    beta << 1.5, -1.0, 0.4, 0, 0, -0.2, 0, 0.8;
    const Vec y = X * beta + random_vector(n, gen, 0.5);
    const Dataset d(X, y);
    const double lam = 0.3;
    const FitResult fit = fit_lasso({Family::gaussian}, d, lam);
    const Vec z = X.transpose() * y / static_cast<double>(n);
    for (Index j = 0; j < p; ++j) CHECK(std::abs(fit.beta(j) - soft_threshold(z(j), lam)) < 1e-6);
}

TEST_CASE("large lambda gives the zero vector") {
    std::mt19937_64 gen(12);
    const Dataset d = random_dataset(Family::gaussian, 40, 10, gen);
    const double top = (d.design().transpose() * d.y()).lpNorm<Eigen::Infinity>() / 40.0;
    CHECK(lasso_lambda_max({Family::gaussian}, d) == doctest::Approx(top));
    CHECK(fit_lasso({Family::gaussian}, d, top).beta.isZero(0.0));
    CHECK(fit_lasso({Family::gaussian}, d, 1.5 * top).beta.isZero(0.0));
}

TEST_CASE("vanishing lambda recovers least squares") {
    std::mt19937_64 gen(13);
    const Mat X = random_matrix(50, 10, gen);
    const Vec y = X * random_vector(10, gen) + random_vector(50, gen);
    const Vec ols = (X.transpose() * X).ldlt().solve(X.transpose() * y);
    const FitResult fit = fit_lasso({Family::gaussian}, Dataset(X, y), 1e-9);
    CHECK((fit.beta - ols).lpNorm<Eigen::Infinity>() < 1e-4);
}

TEST_CASE("objective is nonincreasing and KKT holds at convergence") {
    std::mt19937_64 gen(14);
    for (Family fam : {Family::gaussian, Family::logistic, Family::poisson}) {
        for (bool intercept : {false, true}) {
            const Dataset d = random_dataset(fam, 80, 20, gen, intercept, 0.3);
            const GlmFamily f{fam};
            const double lam = 0.3 * lasso_lambda_max(f, d);
            const FitResult fit = fit_lasso(f, d, lam);
            for (std::size_t k = 1; k < fit.objective_trace.size(); ++k) {
                CHECK(fit.objective_trace[k] <= fit.objective_trace[k - 1] + 1e-12);
            }
            const Vec g = gradient(f, d, fit.beta);
            for (Index j = 0; j < d.num_coef(); ++j) {
                if (intercept && j == 0) {
                    CHECK(std::abs(g(j)) < 1e-5);
                } else if (fit.beta(j) == 0.0) {
                    CHECK(std::abs(g(j)) <= lam + 1e-5);
                } else {
                    CHECK(std::abs(g(j) + lam * (fit.beta(j) > 0 ? 1.0 : -1.0)) < 1e-5);
                }
            }
        }
    }
}

TEST_CASE("non-convergence carries the last iterate") {
    std::mt19937_64 gen(15);
    const Dataset d = random_dataset(Family::logistic, 50, 10, gen);
    LassoOptions opt;
    opt.max_iter = 2;
    try {
        fit_lasso({Family::logistic}, d, 0.01, opt);
        FAIL("expected LassoNotConverged");
    } catch (const LassoNotConverged& e) {
        CHECK(e.last_iterate().size() == 10);
        CHECK(e.iteration() == 2);
    }
}

TEST_CASE("log grid") {
    const auto g = log_grid(2.0, 5, 0.01);
    REQUIRE(g.size() == 5);
    CHECK(g.front() == doctest::Approx(2.0));
    CHECK(g.back() == doctest::Approx(0.02));
    for (std::size_t k = 1; k < g.size(); ++k) CHECK(g[k] < g[k - 1]);
    CHECK_THROWS_AS(log_grid(0.0, 5, 0.1), InputError);
}

TEST_CASE("cross-validation with a single grid point returns it") {
    std::mt19937_64 gen(16);
    const Dataset d = random_dataset(Family::gaussian, 30, 5, gen);
    LassoConfig cfg;
    cfg.lambda_grid = {0.123};
    CHECK(cv_select({Family::gaussian}, d, cfg).lambda == 0.123);
    cfg.lambda_grid = {0.1, 0.2};
    CHECK_THROWS_AS(cv_select({Family::gaussian}, d, cfg), InputError);
    cfg.lambda_grid = {};
    cfg.folds = 1;
    CHECK_THROWS_AS(cv_select({Family::gaussian}, d, cfg), InputError);
}

TEST_CASE("cross-validation is deterministic given the seed") {
    std::mt19937_64 gen(17);
    const Dataset d = random_dataset(Family::gaussian, 60, 15, gen);
    LassoConfig cfg;
    cfg.seed = 5;
    const CvResult a = cv_select({Family::gaussian}, d, cfg);
    const CvResult b = cv_select({Family::gaussian}, d, cfg);
    CHECK(a.lambda == b.lambda);
    CHECK(a.cv_curve == b.cv_curve);
}

TEST_CASE("pure noise selects a large penalty") {
    std::mt19937_64 gen(18);
    int top_quartile = 0;
    const int runs = 50;
    for (int r = 0; r < runs; ++r) {
        const Mat X = random_matrix(100, 50, gen);
        const Dataset d(X, random_vector(100, gen));
        LassoConfig cfg;
        cfg.seed = static_cast<std::uint64_t>(r);
        const CvResult cv = cv_select({Family::gaussian}, d, cfg);
        const auto pos = std::find(cv.grid.begin(), cv.grid.end(), cv.lambda) - cv.grid.begin();
        top_quartile += pos < static_cast<long>(cv.grid.size() / 4);
    }
    CHECK(top_quartile >= 40);
}

TEST_CASE("strong signals are estimated to within one unit") {
    SimScenario s;
    s.design = BetaDesign::sparse_three;
    const Vec beta_star = build_beta_star(s);
    int close = 0;
    for (int r = 0; r < 50; ++r) {
        Philox4x32 rng(99, static_cast<std::uint64_t>(r));
        Mat X = gen_design(100, 50, 0.5, rng);
        Vec y = gen_response({Family::gaussian}, X, beta_star, rng);
        const Dataset d(std::move(X), std::move(y));
        LassoConfig cfg;
        cfg.seed = static_cast<std::uint64_t>(r);
        const CvResult cv = cv_select({Family::gaussian}, d, cfg);
        const Vec b = fit_lasso({Family::gaussian}, d, cv.lambda).beta;
        close += (b - beta_star).lpNorm<Eigen::Infinity>() <= 1.0;
    }
    CHECK(close >= 45);
}

TEST_CASE("logistic folds with a constant response are skipped") {
    std::mt19937_64 gen(19);
    const Mat X = random_matrix(20, 3, gen);
    Vec y = Vec::Zero(20);
    y(0) = 1.0;
    LassoConfig cfg;
    cfg.folds = 4;
    // Every training or test block is constant.
    CHECK_THROWS_AS(cv_select({Family::logistic}, Dataset(X, y), cfg), SolverError);

    y.head(4).setOnes();
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        cfg.seed = seed;
        const CvResult cv = cv_select({Family::logistic}, Dataset(X, y), cfg);
        CHECK(cv.skipped_folds == static_cast<int>(cv.warnings.size()));
        CHECK(cv.skipped_folds < 4);
    }
}
