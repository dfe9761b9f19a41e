#include <doctest.h>
#include <nlohmann/json.hpp>

#include "pplla/io.hpp"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::string kCli = PPLLA_CLI_PATH;
const std::string kData = PPLLA_TEST_DATA_DIR;

struct RunResult {
    int code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path fresh_dir() {
    static std::mt19937_64 gen(std::random_device{}());
    const fs::path d = fs::temp_directory_path() / ("pplla_cli_" + std::to_string(gen()));
    fs::create_directories(d);
    return d;
}

RunResult run(const std::string& args) {
    const fs::path d = fresh_dir();
    const std::string cmd = kCli + " " + args + " >" + (d / "out").string() + " 2>" + (d / "err").string();
    const int status = std::system(cmd.c_str());
    RunResult r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(d / "out");
    r.err = slurp(d / "err");
    fs::remove_all(d);
    return r;
}

json read_json(const fs::path& p) {
    std::ifstream in(p);
    return json::parse(in);
}

std::string data(const std::string& name) { return kData + "/data/" + name; }

}  // namespace

TEST_CASE("logistic test reports valid p-values") {
    const fs::path out = fresh_dir();
    const RunResult r = run("test " + data("logistic.csv") + " " + data("h_logistic.json") +
                            " --seed 3 --output-dir " + out.string());
    REQUIRE(r.code == 0);
    const json rep = read_json(out / "report.json");
    CHECK(rep.at("family") == "logistic");
    REQUIRE(rep.at("tests").size() == 3);
    for (const auto& t : rep.at("tests")) {
        const double p = t.at("p_value").get<double>();
        CHECK(p >= 0.0);
        CHECK(p <= 1.0);
        CHECK(t.at("dof") == 1);
        CHECK(t.at("reject").get<bool>() == (t.at("value").get<double>() > t.at("critical_value").get<double>()));
    }
    fs::remove_all(out);
}

TEST_CASE("rank deficient constraint is an input error") {
    const RunResult r = run("test " + data("linear.csv") + " " + data("h_rank_deficient.json") + " --seed 1");
    CHECK(r.code == 2);
    CHECK(r.err.find("constraint matrix rank deficient") != std::string::npos);
}

TEST_CASE("alpha and lambda are recorded as given") {
    const fs::path out = fresh_dir();
    const RunResult r = run("test " + data("linear.csv") + " " + data("h1.json") +
                            " --alpha 0.1 --lambda 0.25 --seed 2 --output-dir " + out.string());
    REQUIRE(r.code == 0);
    const json rep = read_json(out / "report.json");
    CHECK(rep.at("alpha").get<double>() == 0.1);
    CHECK(rep.at("lambda_hat").get<double>() == 0.25);
    for (const auto& t : rep.at("tests")) {
        CHECK(t.at("alpha").get<double>() == 0.1);
        CHECK(t.at("lambda_hat").get<double>() == 0.25);
    }
    fs::remove_all(out);
}

TEST_CASE("invalid arguments exit with code 2") {
    CHECK(run("simulate table1_p50 --reps 0 --seed 1").code == 2);
    CHECK(run("test " + data("empty.csv") + " " + data("h1.json") + " --seed 1").code == 2);
    CHECK(run("test " + data("missing.csv") + " " + data("h1.json") + " --seed 1").code == 2);
    CHECK(run("test " + data("linear.csv") + " " + data("h1.json") + " --alpha 2 --seed 1").code == 2);
    CHECK(run("frobnicate").code == 2);
}

TEST_CASE("a fixed seed reproduces the output files") {
    const fs::path a = fresh_dir(), b = fresh_dir();
    const std::string base = "test " + data("linear.csv") + " " + data("h1.json") + " --seed 42 --output-dir ";
    REQUIRE(run(base + a.string()).code == 0);
    REQUIRE(run(base + b.string()).code == 0);
    CHECK(slurp(a / "report.json") == slurp(b / "report.json"));
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST_CASE("missing seed is drawn and printed") {
    const fs::path out = fresh_dir();
    const RunResult r = run("test " + data("linear.csv") + " " + data("h1.json") + " --output-dir " + out.string());
    REQUIRE(r.code == 0);
    const auto pos = r.out.find("seed: ");
    REQUIRE(pos != std::string::npos);
    const std::uint64_t printed = std::stoull(r.out.substr(pos + 6));
    CHECK(read_json(out / "report.json").at("seed").get<std::uint64_t>() == printed);
    fs::remove_all(out);
}

TEST_CASE("fit recovers a strong signal") {
    const fs::path out = fresh_dir();
    const RunResult r = run("fit " + data("linear.csv") + " --seed 4 --output-dir " + out.string());
    REQUIRE(r.code == 0);
    const json fit = read_json(out / "fit.json");
    CHECK(fit.at("support") == json::array({1, 2, 5}));
    CHECK_FALSE(fit.at("lambda_fixed").get<bool>());
    fs::remove_all(out);
}

TEST_CASE("report JSON round trip") {
    const fs::path out = fresh_dir();
    REQUIRE(run("test " + data("linear.csv") + " " + data("h1.json") + " --seed 5 --output-dir " + out.string())
                .code == 0);
    const json rep = read_json(out / "report.json");
    const auto reports = pplla::reports_from_json(rep);
    REQUIRE(reports.size() == 3);
    for (std::size_t k = 0; k < 3; ++k) {
        const auto& t = rep.at("tests")[k];
        CHECK(pplla::to_string(reports[k].kind) == t.at("statistic").get<std::string>());
        CHECK(reports[k].value == t.at("value").get<double>());
        CHECK(reports[k].p_value == t.at("p_value").get<double>());
        CHECK(reports[k].reject == t.at("reject").get<bool>());
        CHECK(reports[k].phi_hat == t.at("phi_hat").get<double>());
    }
    fs::remove_all(out);
}

TEST_CASE("printed report matches report.json and the golden rendering") {
    const fs::path out = fresh_dir();
    const RunResult r = run("test " + data("linear.csv") + " " + data("h1.json") + " --seed 42 --output-dir " +
                            out.string());
    REQUIRE(r.code == 0);
    const json rep = read_json(out / "report.json");
    for (const auto& t : rep.at("tests")) {
        CHECK(r.out.find(t.at("value").dump()) != std::string::npos);
        CHECK(r.out.find(t.at("p_value").dump()) != std::string::npos);
        CHECK(r.out.find(t.at("phi_hat").dump()) != std::string::npos);
    }
    CHECK(r.out.find(rep.at("lambda_hat").dump()) != std::string::npos);
    CHECK(r.out == slurp(fs::path(kData) / "golden" / "linear_h1_seed42.txt"));
    fs::remove_all(out);
}

TEST_CASE("simulate writes its tables") {
    const fs::path dir = fresh_dir();
    {
        std::ofstream sc(dir / "mini.json");
        sc << R"({"name": "mini", "family": "gaussian", "n": 60, "p": 10, "h1": 0, "hypothesis": "H1",
                  "reps": 3, "seed": 8, "cv_folds": 5})";
    }
    const RunResult r = run("simulate " + (dir / "mini.json").string() + " --jobs 2 --output-dir " + dir.string());
    REQUIRE(r.code == 0);
    const json res = read_json(dir / "mini.json");
    CHECK(res.contains("tables"));
    CHECK(fs::exists(dir / "mini.txt"));
    CHECK(r.out.find("mini") != std::string::npos);
    fs::remove_all(dir);
}
