#include "pplla/io.hpp"
#include "pplla/sim.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Common {
    std::string family;
    double alpha = 0.05;
    std::optional<std::uint64_t> seed;
    std::string output_dir = ".";
};

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& seed) {
    if (seed) return *seed;
    std::random_device rd;
    const std::uint64_t drawn = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
    std::cout << "seed: " << drawn << "\n";
    return drawn;
}

fs::path ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw pplla::InputError("cannot create output directory '" + dir + "': " + ec.message());
    return fs::path(dir);
}

std::string resolve_scenario(const std::string& arg) {
    if (fs::exists(arg)) return arg;
    const fs::path bundled = fs::path(PPLLA_SCENARIO_DIR) / (arg + ".json");
    if (fs::exists(bundled)) return bundled.string();
    throw pplla::InputError("no scenario file or bundled scenario named '" + arg + "'");
}

pplla::TestConfig make_config(double alpha, std::uint64_t seed, const std::optional<double>& lambda) {
    pplla::TestConfig cfg;
    cfg.alpha = alpha;
    cfg.lasso.seed = seed;
    cfg.fixed_lambda = lambda;
    return cfg;
}

int cmd_test(const std::string& data_path, const std::string& hyp_path, const std::string& response,
             bool intercept, const std::optional<double>& lambda, Common c, bool alpha_given) {
    const pplla::CsvTable table = pplla::read_csv(data_path);
    std::vector<std::string> names;
    const pplla::Dataset data = pplla::dataset_from_table(table, response, intercept, &names);
    const pplla::HypothesisFile hf = pplla::read_hypothesis(hyp_path, intercept);
    pplla::Family fam = pplla::Family::gaussian;
    if (!c.family.empty()) fam = pplla::family_from_string(c.family);
    else if (hf.family) fam = *hf.family;
    const double alpha = alpha_given ? c.alpha : hf.alpha.value_or(c.alpha);
    const std::uint64_t seed = resolve_seed(c.seed);
    const pplla::GlmFamily family{fam};
    const pplla::TestOutcome out =
        pplla::run_test(family, data, hf.spec, make_config(alpha, seed, lambda));
    const json report = pplla::report_to_json(out, hf.spec, family, data, names, seed);
    const fs::path dir = ensure_dir(c.output_dir);
    pplla::write_text((dir / "report.json").string(), report.dump(2) + "\n");
    std::cout << pplla::render_report(report);
    return 0;
}

int cmd_fit(const std::string& data_path, const std::string& response, bool intercept,
            const std::optional<double>& lambda, Common c) {
    const pplla::CsvTable table = pplla::read_csv(data_path);
    std::vector<std::string> names;
    const pplla::Dataset data = pplla::dataset_from_table(table, response, intercept, &names);
    const pplla::GlmFamily family{c.family.empty() ? pplla::Family::gaussian
                                                   : pplla::family_from_string(c.family)};
    const std::uint64_t seed = resolve_seed(c.seed);
    const pplla::FitOutcome out = pplla::fit_model(family, data, make_config(c.alpha, seed, lambda));
    const json j = pplla::fit_to_json(out, family, data, names, seed);
    const fs::path dir = ensure_dir(c.output_dir);
    pplla::write_text((dir / "fit.json").string(), j.dump(2) + "\n");
    std::cout << pplla::render_fit(j);
    return 0;
}

int cmd_simulate(const std::string& scenario_arg, std::optional<int> reps, int jobs,
                 const Common& c) {
    const std::string path = resolve_scenario(scenario_arg);
    std::ifstream in(path);
    json spec;
    try {
        in >> spec;
    } catch (const json::exception& e) {
        throw pplla::InputError("scenario '" + path + "': " + e.what());
    }
    if (reps) {
        if (*reps < 1) throw pplla::InputError("--reps must be at least 1");
        spec["reps"] = *reps;
    }
    if (c.seed) spec["seed"] = *c.seed;
    if (!c.family.empty()) spec["family"] = c.family;
    if (!spec.contains("seed")) spec["seed"] = resolve_seed(std::nullopt);
    if (jobs < 1) throw pplla::InputError("--jobs must be at least 1");
    const std::vector<pplla::SimScenario> scenarios = pplla::expand_scenarios(spec);

    json tables = json::array();
    std::string text;
    for (const auto& s : scenarios) {
        std::string block;
        if (s.mode == pplla::SimMode::rejection) {
            const auto t = pplla::run_replications(s, jobs);
            tables.push_back(pplla::to_json(t));
            block = pplla::render_text(t) + "\n";
        } else {
            const auto t = pplla::estimator_comparison(s, jobs);
            tables.push_back(pplla::to_json(t));
            block = pplla::render_text(t) + "\n";
        }
        std::cout << block << std::flush;
        text += block;
    }
    const std::string name = spec.value("name", std::string("simulation"));
    const fs::path dir = ensure_dir(c.output_dir);
    const json out = {{"scenario", spec}, {"tables", tables}};
    pplla::write_text((dir / (name + ".json")).string(), out.dump(2) + "\n");
    pplla::write_text((dir / (name + ".txt")).string(), text);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Partial penalized Wald, score and likelihood ratio tests for GLMs"};
    app.require_subcommand(1);

    Common common;
    std::string data_path, hyp_path, response = "y", scenario;
    bool intercept = true;
    std::optional<double> lambda;
    std::optional<int> reps;
    int jobs = 1;

    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--family", common.family, "gaussian, logistic or poisson")
            ->check(CLI::IsMember({"gaussian", "logistic", "poisson"}));
        sub->add_option("--seed", common.seed, "seed for all randomness (drawn and printed if absent)");
        sub->add_option("--output-dir", common.output_dir, "directory for output files");
    };

    CLI::App* test = app.add_subcommand("test", "test a linear hypothesis on CSV data");
    test->add_option("data", data_path, "CSV file with a header row")->required();
    test->add_option("hypothesis", hyp_path, "hypothesis JSON file")->required();
    test->add_option("--response", response, "name of the response column");
    CLI::Option* alpha_opt = test->add_option("--alpha", common.alpha, "significance level");
    test->add_option("--lambda", lambda, "fixed tuning parameter (skips GIC)");
    test->add_flag("--intercept,!--no-intercept", intercept, "include an unpenalized intercept");
    add_common(test);

    CLI::App* fit = app.add_subcommand("fit", "fit the penalized model on CSV data");
    fit->add_option("data", data_path, "CSV file with a header row")->required();
    fit->add_option("--response", response, "name of the response column");
    fit->add_option("--lambda", lambda, "fixed tuning parameter (skips GIC)");
    fit->add_flag("--intercept,!--no-intercept", intercept, "include an unpenalized intercept");
    add_common(fit);

    CLI::App* sim = app.add_subcommand("simulate", "run a simulation scenario");
    sim->add_option("scenario", scenario, "scenario JSON file or bundled scenario name")->required();
    sim->add_option("--reps", reps, "number of replications");
    sim->add_option("--jobs", jobs, "worker threads");
    add_common(sim);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*test) return cmd_test(data_path, hyp_path, response, intercept, lambda, common,
                                   alpha_opt->count() > 0);
        if (*fit) return cmd_fit(data_path, response, intercept, lambda, common);
        return cmd_simulate(scenario, reps, jobs, common);
    } catch (const pplla::InputError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const pplla::SolverError& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return 3;
    }
}
