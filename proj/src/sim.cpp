#include "pplla/sim.hpp"

#include "pplla/oracle.hpp"

#include <atomic>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <random>
#include <sstream>
#include <thread>

namespace pplla {

double NormalSampler::operator()(Philox4x32& rng) {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u1 = rng.uniform();
    while (u1 <= 0.0) u1 = rng.uniform();
    const double u2 = rng.uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
}

Mat gen_design(Index n, Index p, double rho, Philox4x32& rng) {
    if (!(std::abs(rho) < 1.0)) throw InputError("AR(1) correlation must satisfy |rho| < 1");
    if (n < 1 || p < 1) throw InputError("design needs n >= 1 and p >= 1");
    NormalSampler normal;
    const double innov = std::sqrt(1.0 - rho * rho);
    Mat X(n, p);
    for (Index i = 0; i < n; ++i) {
        double prev = normal(rng);
        X(i, 0) = prev;
        for (Index j = 1; j < p; ++j) {
            prev = rho * prev + innov * normal(rng);
            X(i, j) = prev;
        }
    }
    return X;
}

Vec gen_response(const GlmFamily& family, const Mat& X, const Vec& beta_star, Philox4x32& rng) {
    if (X.cols() != beta_star.size()) throw InputError("gen_response: shape mismatch");
    const Vec eta = X * beta_star;
    Vec y(X.rows());
    NormalSampler normal;
    for (Index i = 0; i < X.rows(); ++i) {
        switch (family.kind) {
            case Family::gaussian:
                y(i) = eta(i) + normal(rng);
                break;
            case Family::logistic: {
                const double prob = b_derivs(family, eta(i)).b1;
                y(i) = rng.uniform() < prob ? 1.0 : 0.0;
                break;
            }
            case Family::poisson: {
                const double mean = b_derivs_clamped(family, eta(i)).b1;
                std::poisson_distribution<long long> pois(mean);
                y(i) = static_cast<double>(pois(rng));
                break;
            }
        }
    }
    return y;
}

void SimScenario::validate() const {
    if (reps < 1) throw InputError("scenario: reps must be >= 1");
    if (!(alpha > 0.0 && alpha < 1.0)) throw InputError("scenario: alpha must lie in (0, 1)");
    if (!(std::abs(rho) < 1.0)) throw InputError("scenario: |rho| must be < 1");
    if (n < 2 || p < 1) throw InputError("scenario: need n >= 2 and p >= 1");
    if (design == BetaDesign::shifted_pair && p < 2) throw InputError("scenario: design needs p >= 2");
    if (design == BetaDesign::sparse_three && p < 5) throw InputError("scenario: design needs p >= 5");
    if (design == BetaDesign::custom && custom_beta.size() != p) {
        throw InputError("scenario: custom beta must have p entries");
    }
    if (hypothesis == HypothesisId::custom && !custom_hypothesis) {
        throw InputError("scenario: custom hypothesis missing");
    }
    if (hypothesis == HypothesisId::h3 && p < 4) throw InputError("scenario: H3 needs p >= 4");
}

Vec build_beta_star(const SimScenario& s) {
    Vec b = Vec::Zero(s.p);
    switch (s.design) {
        case BetaDesign::shifted_pair:
            b(0) = 2.0;
            b(1) = -2.0 - s.h1;
            break;
        case BetaDesign::sparse_three:
            b(0) = 3.0;
            b(1) = 1.5;
            b(4) = 2.0;
            break;
        case BetaDesign::custom:
            b = s.custom_beta;
            break;
    }
    if (!s.has_intercept) return b;
    Vec out(s.p + 1);
    out(0) = 0.0;
    out.tail(s.p) = b;
    return out;
}

HypothesisSpec build_hypothesis(const SimScenario& s) {
    const Index off = s.has_intercept ? 1 : 0;
    switch (s.hypothesis) {
        case HypothesisId::h1:
            return HypothesisSpec({off, off + 1}, Mat::Ones(1, 2), Vec::Zero(1));
        case HypothesisId::h2:
            return HypothesisSpec({off + 1}, Mat::Ones(1, 1), Vec::Constant(1, -2.0));
        case HypothesisId::h3:
            return HypothesisSpec({off, off + 1, off + 2, off + 3}, Mat::Ones(1, 4), Vec::Zero(1));
        case HypothesisId::beta3_zero:
            return HypothesisSpec({off + 2}, Mat::Ones(1, 1), Vec::Zero(1));
        case HypothesisId::custom:
            return *s.custom_hypothesis;
    }
    throw InputError("scenario: unknown hypothesis");
}

namespace {

std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

bool max_abs_within(const Vec& a, const Vec& b, double tol) {
    return (a - b).lpNorm<Eigen::Infinity>() <= tol;
}

}  // namespace

SelectionMetrics selection_metrics(const Vec& beta_hat, const Vec& beta_star, bool has_intercept) {
    if (beta_hat.size() != beta_star.size()) throw InputError("selection_metrics: length mismatch");
    SelectionMetrics m;
    const Index first = has_intercept ? 1 : 0;
    const Index len = beta_hat.size() - first;
    const Vec diff = beta_hat.tail(len) - beta_star.tail(len);
    m.l1 = diff.lpNorm<1>();
    m.l2 = diff.norm();
    for (Index j = first; j < beta_hat.size(); ++j) {
        const bool selected = beta_hat(j) != 0.0;
        const bool truth = beta_star(j) != 0.0;
        m.false_pos += selected && !truth;
        m.false_neg += !selected && truth;
    }
    return m;
}

ReplicationRecord run_replication(const SimScenario& s, int index) {
    ReplicationRecord rec;
    try {
        const GlmFamily family{s.family};
        const Vec beta_star = build_beta_star(s);
        const HypothesisSpec hyp = build_hypothesis(s);
        const Vec beta_x = s.has_intercept ? Vec(beta_star.tail(s.p)) : beta_star;

        Philox4x32 rng(s.seed, static_cast<std::uint64_t>(index));
        Mat X = gen_design(s.n, s.p, s.rho, rng);
        Vec y = gen_response(family, X, beta_x, rng);
        const Dataset data(std::move(X), std::move(y), s.has_intercept);

        TestConfig cfg = s.test;
        cfg.alpha = s.alpha;
        cfg.lasso.seed = splitmix(s.seed ^ splitmix(static_cast<std::uint64_t>(index)));
        const TestOutcome out = run_test(family, data, hyp, cfg);
        rec.lambda_hat = out.lambda_hat;
        // Reports are wald, score, lrt.
        for (int k = 0; k < 3; ++k) {
            rec.lla_stat[k] = out.reports[k].value;
            rec.lla_reject[k] = out.reports[k].reject;
        }

        if (s.mode == SimMode::estimation) {
            const SelectionMetrics mf = selection_metrics(out.fit_full.beta, beta_star, s.has_intercept);
            const SelectionMetrics m0 =
                selection_metrics(out.fit_reduced.beta, beta_star, s.has_intercept);
            rec.l1_loss = {mf.l1, m0.l1};
            rec.l2_loss = {mf.l2, m0.l2};
            rec.false_pos = {static_cast<double>(mf.false_pos), static_cast<double>(m0.false_pos)};
            rec.false_neg = {static_cast<double>(mf.false_neg), static_cast<double>(m0.false_neg)};
            rec.ok = true;
            return rec;
        }

        IndexSet A;
        for (Index j = s.has_intercept ? 1 : 0; j < beta_star.size(); ++j) {
            if (beta_star(j) != 0.0) A.push_back(j);
        }
        const OracleProblem oracle(family, data, hyp.M(), A, hyp);
        const FitResult of = fit_oracle_full(oracle);
        const FitResult o0 = fit_oracle_reduced(oracle);
        const auto oracle_reports =
            test_from_fits(family, data, hyp, of.beta, o0.beta, s.alpha, out.lambda_hat);
        for (int k = 0; k < 3; ++k) {
            rec.oracle_stat[k] = oracle_reports[k].value;
            rec.oracle_reject[k] = oracle_reports[k].reject;
        }
        rec.full_matches_oracle = max_abs_within(out.fit_full.beta, of.beta, 1e-6);
        rec.reduced_matches_oracle = max_abs_within(out.fit_reduced.beta, o0.beta, 1e-6);

        const PenaltySpec pen{cfg.penalty, out.lambda_hat, cfg.penalty_a};
        rec.events_full = check_lla_events(oracle, of, pen, out.beta_init, beta_star).all();
        rec.events_reduced = check_lla_events(oracle, o0, pen, out.beta_init, beta_star).all();

        const double phi_star = 1.0;
        rec.power_approx = power_approx(family, data, beta_star, hyp, phi_star, A, s.alpha);
        rec.ok = true;
    } catch (const std::exception& e) {
        rec.ok = false;
        rec.error = "replication " + std::to_string(index) + ": " + e.what();
    }
    return rec;
}

std::vector<ReplicationRecord> run_all(const SimScenario& s, int jobs) {
    s.validate();
    std::vector<ReplicationRecord> recs(static_cast<std::size_t>(s.reps));
    jobs = std::max(1, std::min(jobs, s.reps));
    if (jobs == 1) {
        for (int i = 0; i < s.reps; ++i) recs[static_cast<std::size_t>(i)] = run_replication(s, i);
        return recs;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(jobs));
    for (int w = 0; w < jobs; ++w) {
        pool.emplace_back([&] {
            for (int i = next++; i < s.reps; i = next++) {
                recs[static_cast<std::size_t>(i)] = run_replication(s, i);
            }
        });
    }
    for (auto& th : pool) th.join();
    return recs;
}

namespace {

void check_failures(int failures, int total, const std::vector<std::string>& messages) {
    if (failures * 20 > total) {
        throw SolverError(std::to_string(failures) + " of " + std::to_string(total) +
                          " replications failed (more than 5%); first: " +
                          (messages.empty() ? std::string("?") : messages.front()));
    }
}

double se_percent(double prop, int reps) {
    return reps > 0 ? std::sqrt(prop * (1.0 - prop) / reps) * 100.0 : 0.0;
}

constexpr std::array<int, 3> kTableOrder{2, 0, 1};   // lrt, wald, score
constexpr std::array<const char*, 3> kStatNames{"wald", "score", "lrt"};

}  // namespace

const RateColumn& RejectionTable::column(const std::string& estimator,
                                         const std::string& statistic) const {
    for (const auto& c : columns) {
        if (c.estimator == estimator && c.statistic == statistic) return c;
    }
    throw InputError("no column " + estimator + "/" + statistic);
}

RejectionTable tabulate_rejections(const SimScenario& s, const std::vector<ReplicationRecord>& recs) {
    RejectionTable t;
    t.scenario = s.name;
    t.p = s.p;
    t.h1 = s.h1;
    std::array<int, 3> lla{}, orc{};
    std::array<int, 3> pair_agree{}, lla_orc_agree{};
    int full_match = 0, red_match = 0, both = 0, events = 0;
    double power = 0.0, lam = 0.0;
    for (const auto& r : recs) {
        if (!r.ok) {
            ++t.failures;
            t.failure_messages.push_back(r.error);
            continue;
        }
        ++t.reps;
        for (int k = 0; k < 3; ++k) {
            lla[k] += r.lla_reject[k];
            orc[k] += r.oracle_reject[k];
            lla_orc_agree[k] += r.lla_reject[k] == r.oracle_reject[k];
        }
        pair_agree[0] += r.lla_reject[0] == r.lla_reject[1];
        pair_agree[1] += r.lla_reject[0] == r.lla_reject[2];
        pair_agree[2] += r.lla_reject[1] == r.lla_reject[2];
        full_match += r.full_matches_oracle;
        red_match += r.reduced_matches_oracle;
        both += r.full_matches_oracle && r.reduced_matches_oracle;
        events += r.events_full && r.events_reduced;
        power += r.power_approx;
        lam += r.lambda_hat;
    }
    check_failures(t.failures, static_cast<int>(recs.size()), t.failure_messages);
    const double R = t.reps;
    for (const char* est : {"lla", "oracle"}) {
        const auto& counts = std::string(est) == "lla" ? lla : orc;
        for (int k : kTableOrder) {
            RateColumn c;
            c.estimator = est;
            c.statistic = kStatNames[static_cast<std::size_t>(k)];
            c.rejections = counts[static_cast<std::size_t>(k)];
            const double prop = c.rejections / R;
            c.percent = 100.0 * prop;
            c.se = se_percent(prop, t.reps);
            t.columns.push_back(c);
        }
    }
    t.statistic_agreement = *std::min_element(pair_agree.begin(), pair_agree.end()) / R;
    t.lla_oracle_agreement = *std::min_element(lla_orc_agree.begin(), lla_orc_agree.end()) / R;
    t.full_match_rate = full_match / R;
    t.reduced_match_rate = red_match / R;
    t.both_match_rate = both / R;
    t.events_rate = events / R;
    t.mean_power_approx = power / R;
    t.mean_lambda_hat = lam / R;
    return t;
}

RejectionTable run_replications(const SimScenario& s, int jobs) {
    if (s.mode != SimMode::rejection) throw InputError("scenario is not a rejection-rate scenario");
    return tabulate_rejections(s, run_all(s, jobs));
}

LossTable tabulate_losses(const SimScenario& s, const std::vector<ReplicationRecord>& recs) {
    LossTable t;
    t.scenario = s.name;
    t.p = s.p;
    std::array<std::vector<std::array<double, 4>>, 2> vals;
    for (const auto& r : recs) {
        if (!r.ok) {
            ++t.failures;
            t.failure_messages.push_back(r.error);
            continue;
        }
        ++t.reps;
        for (int m = 0; m < 2; ++m) {
            vals[static_cast<std::size_t>(m)].push_back(
                {r.l1_loss[m], r.l2_loss[m], r.false_pos[m], r.false_neg[m]});
        }
    }
    check_failures(t.failures, static_cast<int>(recs.size()), t.failure_messages);
    const char* names[2] = {"LLA (full)", "LLA (reduced)"};
    for (int m = 0; m < 2; ++m) {
        std::array<double, 4> mean{}, se{};
        const auto& v = vals[static_cast<std::size_t>(m)];
        const double R = static_cast<double>(v.size());
        for (int q = 0; q < 4; ++q) {
            double s1 = 0.0, s2 = 0.0;
            for (const auto& row : v) {
                s1 += row[static_cast<std::size_t>(q)];
                s2 += row[static_cast<std::size_t>(q)] * row[static_cast<std::size_t>(q)];
            }
            mean[static_cast<std::size_t>(q)] = s1 / R;
            const double var = R > 1 ? std::max(0.0, (s2 - s1 * s1 / R) / (R - 1.0)) : 0.0;
            se[static_cast<std::size_t>(q)] = std::sqrt(var / R);
        }
        t.rows.push_back({names[m], mean[0], se[0], mean[1], se[1], mean[2], se[2], mean[3], se[3]});
    }
    return t;
}

LossTable estimator_comparison(const SimScenario& s, int jobs) {
    if (s.mode != SimMode::estimation) throw InputError("scenario is not an estimation scenario");
    return tabulate_losses(s, run_all(s, jobs));
}

// ---------------------------------------------------------------------------
// JSON

namespace {

using nlohmann::json;

std::string design_name(BetaDesign d) {
    switch (d) {
        case BetaDesign::shifted_pair: return "shifted_pair";
        case BetaDesign::sparse_three: return "sparse_three";
        case BetaDesign::custom: return "custom";
    }
    return "custom";
}

std::string hypothesis_name(HypothesisId h) {
    switch (h) {
        case HypothesisId::h1: return "H1";
        case HypothesisId::h2: return "H2";
        case HypothesisId::h3: return "H3";
        case HypothesisId::beta3_zero: return "beta3_zero";
        case HypothesisId::custom: return "custom";
    }
    return "custom";
}

}  // namespace

SimScenario scenario_from_json(const json& j) {
    try {
        SimScenario s;
        s.name = j.value("name", s.name);
        const std::string mode = j.value("mode", std::string("rejection"));
        if (mode == "rejection") s.mode = SimMode::rejection;
        else if (mode == "estimation") s.mode = SimMode::estimation;
        else throw InputError("scenario: unknown mode '" + mode + "'");
        s.family = family_from_string(j.value("family", std::string("gaussian")));
        s.n = j.value("n", s.n);
        s.p = j.value("p", s.p);
        s.rho = j.value("rho", s.rho);
        s.h1 = j.value("h1", s.h1);
        s.reps = j.value("reps", s.reps);
        s.alpha = j.value("alpha", s.alpha);
        s.seed = j.value("seed", s.seed);
        s.has_intercept = j.value("intercept", false);

        if (j.contains("beta")) {
            const json& b = j.at("beta");
            if (b.is_string()) {
                const std::string name = b.get<std::string>();
                if (name == "shifted_pair") s.design = BetaDesign::shifted_pair;
                else if (name == "sparse_three") s.design = BetaDesign::sparse_three;
                else throw InputError("scenario: unknown beta builder '" + name + "'");
            } else {
                const auto vals = b.get<std::vector<double>>();
                s.design = BetaDesign::custom;
                s.custom_beta = Eigen::Map<const Vec>(vals.data(), static_cast<Index>(vals.size()));
            }
        }

        if (j.contains("hypothesis")) {
            const json& h = j.at("hypothesis");
            if (h.is_string()) {
                const std::string name = h.get<std::string>();
                if (name == "H1") s.hypothesis = HypothesisId::h1;
                else if (name == "H2") s.hypothesis = HypothesisId::h2;
                else if (name == "H3") s.hypothesis = HypothesisId::h3;
                else if (name == "beta3_zero") s.hypothesis = HypothesisId::beta3_zero;
                else throw InputError("scenario: unknown hypothesis '" + name + "'");
            } else {
                const auto cols = h.at("M").get<std::vector<Index>>();
                const auto rows = h.at("C").get<std::vector<std::vector<double>>>();
                const auto tv = h.at("t").get<std::vector<double>>();
                IndexSet M;
                for (Index c : cols) {
                    if (c < 1) throw InputError("scenario: hypothesis indices are 1-based");
                    M.push_back(c - 1 + (s.has_intercept ? 1 : 0));
                }
                Mat C(static_cast<Index>(rows.size()), static_cast<Index>(M.size()));
                for (std::size_t r = 0; r < rows.size(); ++r) {
                    if (rows[r].size() != M.size()) throw InputError("scenario: ragged C");
                    for (std::size_t c = 0; c < M.size(); ++c) {
                        C(static_cast<Index>(r), static_cast<Index>(c)) = rows[r][c];
                    }
                }
                Vec t = Eigen::Map<const Vec>(tv.data(), static_cast<Index>(tv.size()));
                s.hypothesis = HypothesisId::custom;
                s.custom_hypothesis = HypothesisSpec(std::move(M), std::move(C), std::move(t));
            }
        }

        s.test.penalty = penalty_kind_from_string(j.value("penalty", std::string("scad")));
        s.test.penalty_a = j.value("a", s.test.penalty == PenaltyKind::mcp ? kDefaultMcpA : kDefaultScadA);
        s.test.lasso.folds = j.value("cv_folds", s.test.lasso.folds);
        s.test.lla.steps = j.value("steps", s.test.lla.steps);
        s.test.lla.grid_size = j.value("lla_grid_size", s.test.lla.grid_size);
        s.test.lla.grid_ratio = j.value("lla_grid_ratio", s.test.lla.grid_ratio);
        s.validate();
        return s;
    } catch (const json::exception& e) {
        throw InputError(std::string("scenario: ") + e.what());
    }
}

std::vector<SimScenario> expand_scenarios(const json& j) {
    if (!j.is_object()) throw InputError("scenario: expected a JSON object");
    const auto as_list = [&](const char* key) {
        std::vector<json> out;
        if (!j.contains(key)) return out;
        const json& v = j.at(key);
        if (v.is_array() && !(std::string(key) == "beta")) {
            for (const auto& e : v) out.push_back(e);
        } else {
            out.push_back(v);
        }
        return out;
    };
    std::vector<json> hyps = as_list("hypothesis");
    std::vector<json> h1s = as_list("h1");
    if ((j.contains("h1") && h1s.empty()) || (j.contains("hypothesis") && hyps.empty())) {
        throw InputError("scenario: empty h1 or hypothesis list");
    }
    if (hyps.empty()) hyps.push_back(nullptr);
    if (h1s.empty()) h1s.push_back(nullptr);
    std::vector<SimScenario> out;
    for (const auto& h : hyps) {
        for (const auto& v : h1s) {
            json one = j;
            if (h.is_null()) one.erase("hypothesis"); else one["hypothesis"] = h;
            if (v.is_null()) one.erase("h1"); else one["h1"] = v;
            SimScenario sc = scenario_from_json(one);
            if (hyps.size() > 1 || h1s.size() > 1) {
                std::ostringstream label;
                label << sc.name << " " << hypothesis_name(sc.hypothesis) << " h1=" << sc.h1;
                sc.name = label.str();
            }
            out.push_back(std::move(sc));
        }
    }
    return out;
}

json to_json(const SimScenario& s) {
    json j;
    j["name"] = s.name;
    j["mode"] = s.mode == SimMode::rejection ? "rejection" : "estimation";
    j["family"] = to_string(s.family);
    j["n"] = s.n;
    j["p"] = s.p;
    j["rho"] = s.rho;
    if (s.design == BetaDesign::custom) {
        j["beta"] = std::vector<double>(s.custom_beta.data(), s.custom_beta.data() + s.custom_beta.size());
    } else {
        j["beta"] = design_name(s.design);
    }
    j["h1"] = s.h1;
    if (s.hypothesis == HypothesisId::custom) {
        const HypothesisSpec& h = *s.custom_hypothesis;
        std::vector<Index> cols;
        for (Index m : h.M()) cols.push_back(m + 1 - (s.has_intercept ? 1 : 0));
        std::vector<std::vector<double>> rows;
        for (Index r = 0; r < h.C().rows(); ++r) {
            rows.emplace_back();
            for (Index c = 0; c < h.C().cols(); ++c) rows.back().push_back(h.C()(r, c));
        }
        j["hypothesis"] = {{"M", cols}, {"C", rows},
                           {"t", std::vector<double>(h.t().data(), h.t().data() + h.t().size())}};
    } else {
        j["hypothesis"] = hypothesis_name(s.hypothesis);
    }
    j["reps"] = s.reps;
    j["alpha"] = s.alpha;
    j["seed"] = s.seed;
    j["intercept"] = s.has_intercept;
    j["penalty"] = to_string(s.test.penalty);
    j["a"] = s.test.penalty_a;
    j["cv_folds"] = s.test.lasso.folds;
    j["steps"] = s.test.lla.steps;
    j["lla_grid_size"] = s.test.lla.grid_size;
    j["lla_grid_ratio"] = s.test.lla.grid_ratio;
    return j;
}

json to_json(const RejectionTable& t) {
    json cols = json::array();
    for (const auto& c : t.columns) {
        cols.push_back({{"estimator", c.estimator}, {"statistic", c.statistic},
                        {"rejections", c.rejections}, {"percent", c.percent}, {"se", c.se}});
    }
    return {{"scenario", t.scenario},
            {"p", t.p},
            {"h1", t.h1},
            {"reps", t.reps},
            {"failures", t.failures},
            {"failure_messages", t.failure_messages},
            {"columns", cols},
            {"statistic_agreement", t.statistic_agreement},
            {"lla_oracle_agreement", t.lla_oracle_agreement},
            {"full_match_rate", t.full_match_rate},
            {"reduced_match_rate", t.reduced_match_rate},
            {"both_match_rate", t.both_match_rate},
            {"events_rate", t.events_rate},
            {"mean_power_approx", t.mean_power_approx},
            {"mean_lambda_hat", t.mean_lambda_hat}};
}

json to_json(const LossTable& t) {
    json rows = json::array();
    for (const auto& r : t.rows) {
        rows.push_back({{"method", r.method}, {"l1", r.l1}, {"l1_se", r.l1_se}, {"l2", r.l2},
                        {"l2_se", r.l2_se}, {"fp", r.fp}, {"fp_se", r.fp_se}, {"fn", r.fn},
                        {"fn_se", r.fn_se}});
    }
    return {{"scenario", t.scenario}, {"p", t.p}, {"reps", t.reps}, {"failures", t.failures},
            {"failure_messages", t.failure_messages}, {"rows", rows}};
}

namespace {

std::string cell(double v, double se) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(2) << v << " (" << se << ")";
    return os.str();
}

}  // namespace

std::string render_text(const RejectionTable& t) {
    std::ostringstream os;
    os << "Rejection rates (%) -- " << t.scenario << ", p = " << t.p << ", h1 = " << t.h1
       << ", reps = " << t.reps << ", failures = " << t.failures << "\n";
    os << std::left << std::setw(8) << "" << std::setw(16) << "LLA" << std::setw(16) << ""
       << std::setw(16) << "" << std::setw(16) << "Oracle" << "\n";
    os << std::left << std::setw(8) << "";
    for (const auto& c : t.columns) os << std::setw(16) << c.statistic;
    os << "\n" << std::setw(8) << "";
    for (const auto& c : t.columns) os << std::setw(16) << cell(c.percent, c.se);
    os << "\n";
    os << std::fixed << std::setprecision(4);
    os << "statistic agreement " << t.statistic_agreement << ", LLA/oracle agreement "
       << t.lla_oracle_agreement << ", LLA = oracle (full " << t.full_match_rate << ", reduced "
       << t.reduced_match_rate << "), events " << t.events_rate << ", mean power approx "
       << t.mean_power_approx << "\n";
    return os.str();
}

std::string render_text(const LossTable& t) {
    std::ostringstream os;
    os << "Estimator comparison -- " << t.scenario << ", p = " << t.p << ", reps = " << t.reps
       << ", failures = " << t.failures << "\n";
    os << std::left << std::setw(16) << "Method" << std::setw(16) << "l1 loss" << std::setw(16)
       << "l2 loss" << std::setw(16) << "#FP" << std::setw(16) << "#FN" << "\n";
    for (const auto& r : t.rows) {
        os << std::setw(16) << r.method << std::setw(16) << cell(r.l1, r.l1_se) << std::setw(16)
           << cell(r.l2, r.l2_se) << std::setw(16) << cell(r.fp, r.fp_se) << std::setw(16)
           << cell(r.fn, r.fn_se) << "\n";
    }
    return os.str();
}

}  // namespace pplla
