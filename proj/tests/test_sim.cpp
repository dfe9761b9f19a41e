#include "pplla/sim.hpp"

#include <doctest.h>

#include <cmath>

using namespace pplla;

TEST_CASE("design rows have AR(1) covariance") {
    Philox4x32 rng(5, 0);
    const Index n = 10000, p = 6;
    const double rho = 0.5;
    const Mat X = gen_design(n, p, rho, rng);
    const Mat S = X.transpose() * X / static_cast<double>(n);
    for (Index j = 0; j < p; ++j) {
        CHECK(std::abs(X.col(j).mean()) < 0.04);
        for (Index k = 0; k < p; ++k) {
            CHECK(std::abs(S(j, k) - std::pow(rho, std::abs(j - k))) < 0.05);
        }
    }
}

TEST_CASE("generation is deterministic per seed and stream") {
    Philox4x32 a(11, 3), b(11, 3), c(11, 4);
    const Mat Xa = gen_design(20, 5, 0.5, a);
    const Mat Xb = gen_design(20, 5, 0.5, b);
    const Mat Xc = gen_design(20, 5, 0.5, c);
    CHECK(Xa == Xb);
    CHECK(Xa != Xc);
    CHECK(gen_response({Family::logistic}, Xa, Vec::Ones(5), a) ==
          gen_response({Family::logistic}, Xb, Vec::Ones(5), b));
}

TEST_CASE("responses have the family means") {
    Philox4x32 rng(12, 0);
    const Index n = 20000;
    const Mat X = gen_design(n, 3, 0.3, rng);
    Vec beta(3);
    beta << 0.5, -0.3, 0.2;
    const Vec eta = X * beta;

    const Vec yg = gen_response({Family::gaussian}, X, beta, rng);
    const Vec eg = yg - eta;
    CHECK(std::abs(eg.mean()) < 4.0 / std::sqrt(static_cast<double>(n)));
    CHECK(std::abs(eg.squaredNorm() / n - 1.0) < 0.05);

    const Vec yl = gen_response({Family::logistic}, X, beta, rng);
    const Vec pl = eta.unaryExpr([](double e) { return 1.0 / (1.0 + std::exp(-e)); });
    CHECK(std::abs((yl - pl).mean()) < 4.0 * 0.5 / std::sqrt(static_cast<double>(n)));
    for (Index i = 0; i < n; ++i) REQUIRE((yl(i) == 0.0 || yl(i) == 1.0));

    const Vec yp = gen_response({Family::poisson}, X, beta, rng);
    const Vec mp = eta.array().exp();
    const double sd = std::sqrt(mp.mean() / n);
    CHECK(std::abs((yp - mp).mean()) < 4.0 * sd);
}

TEST_CASE("normal sampler moments") {
    Philox4x32 rng(13, 0);
    NormalSampler z;
    const int m = 200000;
    double s1 = 0, s2 = 0, s4 = 0;
    for (int i = 0; i < m; ++i) {
        const double v = z(rng);
        s1 += v;
        s2 += v * v;
        s4 += v * v * v * v;
    }
    CHECK(std::abs(s1 / m) < 0.01);
    CHECK(std::abs(s2 / m - 1.0) < 0.015);
    CHECK(std::abs(s4 / m - 3.0) < 0.08);
}

TEST_CASE("coefficient designs and hypotheses") {
    SimScenario s;
    s.h1 = 0.2;
    Vec b = build_beta_star(s);
    CHECK(b(0) == 2.0);
    CHECK(b(1) == doctest::Approx(-2.2));
    CHECK(b.tail(48).isZero());
    const HypothesisSpec h1 = build_hypothesis(s);
    CHECK(h1.M() == IndexSet{0, 1});
    CHECK((h1.C() * gather(b, h1.M()) - h1.t())(0) == doctest::Approx(-0.2));

    s.has_intercept = true;
    b = build_beta_star(s);
    CHECK(b.size() == 51);
    CHECK(b(0) == 0.0);
    CHECK(build_hypothesis(s).M() == IndexSet{1, 2});

    SimScenario t;
    t.design = BetaDesign::sparse_three;
    t.hypothesis = HypothesisId::beta3_zero;
    const Vec bt = build_beta_star(t);
    CHECK(bt(0) == 3.0);
    CHECK(bt(1) == 1.5);
    CHECK(bt(4) == 2.0);
    CHECK(build_hypothesis(t).M() == IndexSet{2});
}

TEST_CASE("selection metrics") {
    Vec star(5);
    star << 1.0, 0.0, -2.0, 0.0, 0.0;
    const auto zero = selection_metrics(star, star, false);
    CHECK(zero.l1 == 0.0);
    CHECK(zero.l2 == 0.0);
    CHECK(zero.false_pos == 0);
    CHECK(zero.false_neg == 0);
    Vec hat(5);
    hat << 0.5, 0.1, 0.0, 0.0, -0.2;
    const auto m = selection_metrics(hat, star, false);
    CHECK(m.l1 == doctest::Approx(0.5 + 0.1 + 2.0 + 0.2));
    CHECK(m.l2 == doctest::Approx(std::sqrt(0.25 + 0.01 + 4.0 + 0.04)));
    CHECK(m.false_pos == 2);
    CHECK(m.false_neg == 1);
    const auto mi = selection_metrics(hat, star, true);
    CHECK(mi.false_neg == 1);
    CHECK(mi.l1 == doctest::Approx(0.1 + 2.0 + 0.2));
}

TEST_CASE("rejection table arithmetic") {
    SimScenario s;
    s.reps = 10;
    std::vector<ReplicationRecord> recs(10);
    for (int i = 0; i < 10; ++i) {
        auto& r = recs[static_cast<std::size_t>(i)];
        r.ok = true;
        r.lla_reject = {i < 2, i < 3, i < 2};
        r.oracle_reject = {i < 2, i < 2, i < 2};
        r.full_matches_oracle = true;
        r.reduced_matches_oracle = i != 0;
        r.events_full = r.events_reduced = true;
        r.power_approx = 0.1 * i;
    }
    const RejectionTable t = tabulate_rejections(s, recs);
    CHECK(t.reps == 10);
    CHECK(t.failures == 0);
    const RateColumn& lrt = t.column("lla", "lrt");
    CHECK(lrt.rejections == 2);
    CHECK(lrt.percent == doctest::Approx(20.0));
    CHECK(lrt.se == doctest::Approx(std::sqrt(0.2 * 0.8 / 10) * 100));
    CHECK(t.column("lla", "score").rejections == 3);
    CHECK(t.column("lla", "wald").rejections == 2);
    CHECK(t.columns.front().estimator == "lla");
    CHECK(t.columns.front().statistic == "lrt");
    CHECK(t.statistic_agreement == doctest::Approx(0.9));
    CHECK(t.both_match_rate == doctest::Approx(0.9));
    CHECK(t.mean_power_approx == doctest::Approx(0.45));

    recs[3].ok = recs[7].ok = false;
    recs[3].error = recs[7].error = "replication failed";
    CHECK_THROWS_AS(tabulate_rejections(s, recs), SolverError);
}

TEST_CASE("results do not depend on the thread count") {
    SimScenario s;
    s.n = 60;
    s.p = 10;
    s.reps = 6;
    s.seed = 99;
    s.test.lasso.folds = 5;
    const auto a = run_all(s, 1);
    const auto b = run_all(s, 3);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].ok == b[i].ok);
        CHECK(a[i].lla_stat == b[i].lla_stat);
        CHECK(a[i].oracle_stat == b[i].oracle_stat);
        CHECK(a[i].lambda_hat == b[i].lambda_hat);
    }
    const auto again = run_replication(s, 4);
    CHECK(again.lla_stat == a[4].lla_stat);
}

TEST_CASE("scenario JSON") {
    const nlohmann::json j = nlohmann::json::parse(R"({
        "name": "demo", "mode": "rejection", "family": "logistic", "n": 80, "p": 12,
        "rho": 0.3, "beta": "shifted_pair", "h1": [0, 0.5], "hypothesis": ["H1", "H2"],
        "reps": 7, "alpha": 0.1, "seed": 5
    })");
    const auto all = expand_scenarios(j);
    REQUIRE(all.size() == 4);
    CHECK(all[0].hypothesis == HypothesisId::h1);
    CHECK(all[1].h1 == 0.5);
    CHECK(all[2].hypothesis == HypothesisId::h2);
    CHECK(all[3].name == "demo H2 h1=0.5");
    CHECK(all[0].family == Family::logistic);
    CHECK(all[0].alpha == 0.1);

    const SimScenario back = scenario_from_json(to_json(all[3]));
    CHECK(back.n == 80);
    CHECK(back.p == 12);
    CHECK(back.rho == 0.3);
    CHECK(back.h1 == 0.5);
    CHECK(back.reps == 7);
    CHECK(back.seed == 5u);
    CHECK(back.hypothesis == HypothesisId::h2);
    CHECK(to_json(back) == to_json(all[3]));

    nlohmann::json custom = nlohmann::json::parse(R"({
        "n": 50, "p": 4, "beta": [1, 0, 0, -1],
        "hypothesis": {"M": [1, 4], "C": [[1, 1]], "t": [0]}
    })");
    const SimScenario c = scenario_from_json(custom);
    CHECK(c.design == BetaDesign::custom);
    CHECK(c.custom_hypothesis->M() == IndexSet{0, 3});
    CHECK(scenario_from_json(to_json(c)).custom_hypothesis->M() == IndexSet{0, 3});

    CHECK_THROWS_AS(scenario_from_json(nlohmann::json::parse(R"({"reps": 0})")), InputError);
    CHECK_THROWS_AS(scenario_from_json(nlohmann::json::parse(R"({"beta": [1, 2], "p": 3})")), InputError);
}
