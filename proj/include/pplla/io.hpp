#pragma once

#include "pplla/inference.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace pplla {

struct CsvTable {
    std::vector<std::string> header;
    Mat values;
};

CsvTable parse_csv(std::istream& in);
CsvTable read_csv(const std::string& path);

/// Splits off the response column; the remaining columns become predictors in file order.
Dataset dataset_from_table(const CsvTable& table, const std::string& response, bool has_intercept,
                           std::vector<std::string>* predictor_names = nullptr);

/// {"M": [1-based predictor columns], "C": [[...], ...], "t": [...], "family": ..., "alpha": ...}
struct HypothesisFile {
    HypothesisSpec spec;
    std::optional<Family> family;
    std::optional<double> alpha;
};

HypothesisFile hypothesis_from_json(const nlohmann::json& j, bool has_intercept);
HypothesisFile read_hypothesis(const std::string& path, bool has_intercept);

/// Coefficient index <-> 1-based predictor column (the intercept maps to 0).
Index column_of(Index coef, bool has_intercept);
Index coef_of(Index column, bool has_intercept);

nlohmann::json report_to_json(const TestOutcome& out, const HypothesisSpec& hyp,
                              const GlmFamily& family, const Dataset& data,
                              const std::vector<std::string>& names, std::uint64_t seed);
std::array<TestReport, 3> reports_from_json(const nlohmann::json& j);
/// Human table built from the report JSON itself, so every number printed is the
/// serialized one.
std::string render_report(const nlohmann::json& j);

nlohmann::json fit_to_json(const FitOutcome& out, const GlmFamily& family, const Dataset& data,
                           const std::vector<std::string>& names, std::uint64_t seed);
std::string render_fit(const nlohmann::json& j);

void write_text(const std::string& path, const std::string& text);

}  // namespace pplla
