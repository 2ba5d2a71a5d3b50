#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "effpred/confidence.hpp"
#include "effpred/cost_model.hpp"
#include "effpred/curves.hpp"
#include "effpred/predictor.hpp"
#include "effpred/similarity.hpp"

#include <json.hpp>

namespace effpred::io {

using Json = nlohmann::ordered_json;

/// 17 significant digits, the round-trip precision of binary64.
std::string format_number(double value);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

// Confidence JSON Lines -------------------------------------------------------

/// One object per line: {example_id, token_probs[, predicted_text]}.
std::vector<confidence::ConfidenceRecord> read_confidence_records(std::istream& in);

/// Accepts score lines {example_id, method, value} as well as raw record
/// lines, which are scored with `method_for_records`.
std::vector<confidence::ConfidenceScore> read_confidence_scores(std::istream& in,
                                                                confidence::Method method_for_records);

void write_confidence_scores(std::ostream& out, std::span<const confidence::ConfidenceScore> scores);

// Task measurements -----------------------------------------------------------

/// A single object or an array of objects with fields task_id, budgets,
/// raw_acc, zero_shot_acc, human_level_acc (nullable).
std::vector<curves::TaskMeasurements> parse_measurements(const Json& doc);

// Task tables -----------------------------------------------------------------

/// CSV with header task_id,d,auc (extra columns ignored).
std::vector<predictor::TaskPoint> read_task_table(std::istream& in);

/// Splits a CSV file into header-keyed rows. No quoting support.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const;  ///< parse error if absent
  bool has_column(const std::string& name) const;
};
CsvTable read_csv(std::istream& in);

double parse_double(const std::string& text, const std::string& context);
std::uint64_t parse_uint(const std::string& text, const std::string& context);

// Report builders ---------------------------------------------------------------

Json to_json(const similarity::MetricValue& value);
Json to_json(const confidence::SegmentSelection& selection);
Json to_json(const predictor::RegressionModel& model);
Json to_json(const predictor::HoldOneOutReport& report);
Json to_json(const predictor::BudgetPrediction& prediction);
Json curve_summary(const curves::EfficiencyCurve& curve);

/// Parses the output of to_json(RegressionModel).
predictor::RegressionModel regression_from_json(const Json& doc);

}  // namespace effpred::io
