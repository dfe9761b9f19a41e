#include "pplla/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace pplla {

using nlohmann::json;

namespace {

std::string trim(std::string s) {
    const auto keep = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), keep));
    s.erase(std::find_if(s.rbegin(), s.rend(), keep).base(), s.end());
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
    return s;
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

double parse_number(const std::string& s, std::size_t row, std::size_t col) {
    double v = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    if (!s.empty() && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (s.empty() || ec != std::errc() || ptr != last) {
        throw InputError("CSV row " + std::to_string(row) + ", column " + std::to_string(col + 1) +
                         ": '" + s + "' is not a number");
    }
    return v;
}

std::vector<double> vec_to_std(const Vec& v) { return {v.data(), v.data() + v.size()}; }

json indices_to_columns(const IndexSet& s, bool has_intercept) {
    json a = json::array();
    for (Index j : s) a.push_back(column_of(j, has_intercept));
    return a;
}

IndexSet columns_to_indices(const json& a, bool has_intercept) {
    IndexSet s;
    for (const auto& c : a) s.push_back(coef_of(c.get<Index>(), has_intercept));
    return s;
}

std::string num(const json& v) { return v.dump(); }

}  // namespace

CsvTable parse_csv(std::istream& in) {
    CsvTable t;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!trim(line).empty()) break;
    }
    if (trim(line).empty()) throw InputError("empty CSV");
    t.header = split(line);
    const std::size_t cols = t.header.size();
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        const auto cells = split(line);
        if (cells.size() != cols) {
            throw InputError("CSV row " + std::to_string(rows.size() + 1) + " has " +
                             std::to_string(cells.size()) + " fields, header has " +
                             std::to_string(cols));
        }
        std::vector<double> row(cols);
        for (std::size_t c = 0; c < cols; ++c) row[c] = parse_number(cells[c], rows.size() + 1, c);
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw InputError("CSV has no data rows");
    t.values.resize(static_cast<Index>(rows.size()), static_cast<Index>(cols));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            t.values(static_cast<Index>(r), static_cast<Index>(c)) = rows[r][c];
        }
    }
    return t;
}

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open data file '" + path + "'");
    return parse_csv(in);
}

Dataset dataset_from_table(const CsvTable& table, const std::string& response, bool has_intercept,
                           std::vector<std::string>* predictor_names) {
    const auto it = std::find(table.header.begin(), table.header.end(), response);
    if (it == table.header.end()) throw InputError("response column '" + response + "' not found");
    const Index ycol = static_cast<Index>(it - table.header.begin());
    const Index cols = table.values.cols();
    if (cols < 2) throw InputError("CSV needs at least one predictor column");
    Mat X(table.values.rows(), cols - 1);
    std::vector<std::string> names;
    for (Index c = 0, k = 0; c < cols; ++c) {
        if (c == ycol) continue;
        X.col(k++) = table.values.col(c);
        names.push_back(table.header[static_cast<std::size_t>(c)]);
    }
    if (predictor_names) *predictor_names = std::move(names);
    return Dataset(std::move(X), table.values.col(ycol), has_intercept);
}

Index column_of(Index coef, bool has_intercept) { return has_intercept ? coef : coef + 1; }
Index coef_of(Index column, bool has_intercept) { return has_intercept ? column : column - 1; }

HypothesisFile hypothesis_from_json(const json& j, bool has_intercept) {
    try {
        const auto cols = j.at("M").get<std::vector<Index>>();
        const auto rows = j.at("C").get<std::vector<std::vector<double>>>();
        const auto tv = j.at("t").get<std::vector<double>>();
        IndexSet M;
        for (Index c : cols) {
            if (c < 1) throw InputError("hypothesis: M holds 1-based predictor columns");
            M.push_back(coef_of(c, has_intercept));
        }
        Mat C(static_cast<Index>(rows.size()), static_cast<Index>(M.size()));
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (rows[r].size() != M.size()) {
                throw InputError("hypothesis: every row of C needs |M| = " + std::to_string(M.size()) +
                                 " entries");
            }
            for (std::size_t c = 0; c < M.size(); ++c) {
                C(static_cast<Index>(r), static_cast<Index>(c)) = rows[r][c];
            }
        }
        HypothesisFile h{HypothesisSpec(std::move(M), std::move(C),
                                        Eigen::Map<const Vec>(tv.data(), static_cast<Index>(tv.size()))),
                         std::nullopt, std::nullopt};
        if (j.contains("family")) h.family = family_from_string(j.at("family").get<std::string>());
        if (j.contains("alpha")) h.alpha = j.at("alpha").get<double>();
        return h;
    } catch (const json::exception& e) {
        throw InputError(std::string("hypothesis file: ") + e.what());
    }
}

HypothesisFile read_hypothesis(const std::string& path, bool has_intercept) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open hypothesis file '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw InputError("hypothesis file '" + path + "': " + e.what());
    }
    return hypothesis_from_json(j, has_intercept);
}

json report_to_json(const TestOutcome& out, const HypothesisSpec& hyp, const GlmFamily& family,
                    const Dataset& data, const std::vector<std::string>& names,
                    std::uint64_t seed) {
    const bool ic = data.has_intercept();
    json tests = json::array();
    for (const TestReport& r : out.reports) {
        tests.push_back({{"statistic", to_string(r.kind)},
                         {"value", r.value},
                         {"dof", r.dof},
                         {"p_value", r.p_value},
                         {"alpha", r.alpha},
                         {"critical_value", r.critical_value},
                         {"reject", r.reject},
                         {"phi_hat", r.phi_hat},
                         {"support_full", indices_to_columns(r.support_full, ic)},
                         {"support_reduced", indices_to_columns(r.support_reduced, ic)},
                         {"lambda_hat", r.lambda_hat},
                         {"negative_statistic", r.negative_statistic}});
    }
    json gic = nullptr;
    if (out.gic) {
        json table = json::array();
        for (const auto& row : out.gic->table) {
            table.push_back({{"lambda", row.lambda}, {"loss", row.loss}, {"nonzeros", row.nonzeros},
                             {"gic", row.gic}});
        }
        gic = {{"c_n", out.gic->c_n}, {"index", out.gic->index}, {"table", table}};
    }
    std::vector<std::vector<double>> C;
    for (Index r = 0; r < hyp.C().rows(); ++r) {
        C.emplace_back();
        for (Index c = 0; c < hyp.C().cols(); ++c) C.back().push_back(hyp.C()(r, c));
    }
    return {{"family", to_string(family.kind)},
            {"n", data.n()},
            {"p", data.p()},
            {"intercept", ic},
            {"predictors", names},
            {"seed", seed},
            {"hypothesis",
             {{"M", indices_to_columns(hyp.M(), ic)}, {"C", C}, {"t", vec_to_std(hyp.t())}}},
            {"alpha", out.reports[0].alpha},
            {"lambda_hat", out.lambda_hat},
            {"lambda_lasso", out.lambda_lasso},
            {"phi_full", out.phi_full},
            {"phi_reduced", out.phi_reduced},
            {"tests", tests},
            {"beta_full", vec_to_std(out.fit_full.beta)},
            {"beta_reduced", vec_to_std(out.fit_reduced.beta)},
            {"diagnostics",
             {{"full_converged", out.fit_full.converged},
              {"reduced_converged", out.fit_reduced.converged},
              {"full_steps_coincide", out.fit_full.steps_coincide},
              {"reduced_steps_coincide", out.fit_reduced.steps_coincide},
              {"cv_skipped_folds", out.cv.skipped_folds},
              {"gic", gic},
              {"warnings", out.warnings}}}};
}

std::array<TestReport, 3> reports_from_json(const json& j) {
    try {
        const bool ic = j.at("intercept").get<bool>();
        const json& tests = j.at("tests");
        if (tests.size() != 3) throw InputError("report: expected three tests");
        std::array<TestReport, 3> out;
        for (std::size_t k = 0; k < 3; ++k) {
            const json& t = tests[k];
            TestReport& r = out[k];
            const std::string kind = t.at("statistic").get<std::string>();
            if (kind == "wald") r.kind = StatisticKind::wald;
            else if (kind == "score") r.kind = StatisticKind::score;
            else if (kind == "lrt") r.kind = StatisticKind::lrt;
            else throw InputError("report: unknown statistic '" + kind + "'");
            r.value = t.at("value").get<double>();
            r.dof = t.at("dof").get<Index>();
            r.p_value = t.at("p_value").get<double>();
            r.alpha = t.at("alpha").get<double>();
            r.critical_value = t.at("critical_value").get<double>();
            r.reject = t.at("reject").get<bool>();
            r.phi_hat = t.at("phi_hat").get<double>();
            r.support_full = columns_to_indices(t.at("support_full"), ic);
            r.support_reduced = columns_to_indices(t.at("support_reduced"), ic);
            r.lambda_hat = t.at("lambda_hat").get<double>();
            r.negative_statistic = t.at("negative_statistic").get<bool>();
        }
        return out;
    } catch (const json::exception& e) {
        throw InputError(std::string("report: ") + e.what());
    }
}

std::string render_report(const json& j) {
    std::ostringstream os;
    os << "family " << j.at("family").get<std::string>() << ", n = " << num(j.at("n"))
       << ", p = " << num(j.at("p")) << ", seed = " << num(j.at("seed")) << "\n";
    os << "lambda_hat = " << num(j.at("lambda_hat")) << ", alpha = " << num(j.at("alpha"))
       << "\n\n";
    os << std::left << std::setw(8) << "test" << std::setw(26) << "statistic" << std::setw(5)
       << "df" << std::setw(26) << "p-value" << std::setw(26) << "critical" << std::setw(8)
       << "reject" << "phi_hat\n";
    for (const auto& t : j.at("tests")) {
        os << std::setw(8) << t.at("statistic").get<std::string>() << std::setw(26)
           << num(t.at("value")) << std::setw(5) << num(t.at("dof")) << std::setw(26)
           << num(t.at("p_value")) << std::setw(26) << num(t.at("critical_value")) << std::setw(8)
           << (t.at("reject").get<bool>() ? "yes" : "no") << num(t.at("phi_hat")) << "\n";
    }
    const json& first = j.at("tests").at(0);
    os << "\nsupport (full):    " << first.at("support_full").dump() << "\n";
    os << "support (reduced): " << first.at("support_reduced").dump() << "\n";
    for (const auto& w : j.at("diagnostics").at("warnings")) {
        os << "warning: " << w.get<std::string>() << "\n";
    }
    return os.str();
}

json fit_to_json(const FitOutcome& out, const GlmFamily& family, const Dataset& data,
                 const std::vector<std::string>& names, std::uint64_t seed) {
    const bool ic = data.has_intercept();
    json coefs = json::array();
    for (Index j = 0; j < out.fit.beta.size(); ++j) {
        const Index col = column_of(j, ic);
        coefs.push_back({{"column", col},
                         {"name", col == 0 ? std::string("(intercept)")
                                           : names.at(static_cast<std::size_t>(col - 1))},
                         {"estimate", out.fit.beta(j)}});
    }
    json gic = nullptr;
    if (out.gic) {
        json table = json::array();
        for (const auto& row : out.gic->table) {
            table.push_back({{"lambda", row.lambda}, {"loss", row.loss}, {"nonzeros", row.nonzeros},
                             {"gic", row.gic}});
        }
        gic = {{"c_n", out.gic->c_n}, {"index", out.gic->index}, {"table", table}};
    }
    return {{"family", to_string(family.kind)},
            {"n", data.n()},
            {"p", data.p()},
            {"intercept", ic},
            {"seed", seed},
            {"lambda", out.lambda_hat},
            {"lambda_fixed", !out.gic.has_value()},
            {"lambda_lasso", out.lambda_lasso},
            {"coefficients", coefs},
            {"support", indices_to_columns(support_set(out.fit.beta, {}, ic), ic)},
            {"converged", out.fit.converged},
            {"gic", gic},
            {"warnings", out.warnings}};
}

std::string render_fit(const json& j) {
    std::ostringstream os;
    os << "family " << j.at("family").get<std::string>() << ", n = " << num(j.at("n"))
       << ", p = " << num(j.at("p")) << ", seed = " << num(j.at("seed")) << "\n";
    os << "lambda = " << num(j.at("lambda"))
       << (j.at("lambda_fixed").get<bool>() ? " (fixed)" : " (GIC)") << "\n";
    os << "support: " << j.at("support").dump() << "\n\n";
    os << std::left << std::setw(8) << "column" << std::setw(20) << "name" << "estimate\n";
    for (const auto& c : j.at("coefficients")) {
        if (c.at("estimate").get<double>() == 0.0) continue;
        os << std::setw(8) << num(c.at("column")) << std::setw(20) << c.at("name").get<std::string>()
           << num(c.at("estimate")) << "\n";
    }
    return os.str();
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write '" + path + "'");
    out << text;
    if (!out) throw InputError("write failed for '" + path + "'");
}

}  // namespace pplla
