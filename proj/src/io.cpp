#include "effpred/io.hpp"

#include <fmt/format.h>

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "effpred/error.hpp"

namespace effpred::io {
namespace {

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::string line_context(std::size_t line_no) { return "line=" + std::to_string(line_no); }

Json parse_json_line(const std::string& line, std::size_t line_no) {
  try {
    return Json::parse(line);
  } catch (const Json::parse_error& e) {
    fail(ErrorCode::kParse, std::string("invalid JSON: ") + e.what(), line_context(line_no));
  }
}

std::uint64_t json_id(const Json& obj, std::size_t line_no) {
  if (!obj.contains("example_id") || !obj["example_id"].is_number_integer())
    fail(ErrorCode::kParse, "example_id must be an integer", line_context(line_no));
  if (obj["example_id"].is_number_unsigned()) return obj["example_id"].get<std::uint64_t>();
  const auto v = obj["example_id"].get<std::int64_t>();
  if (v < 0) fail(ErrorCode::kParse, "example_id must be non-negative", line_context(line_no));
  return static_cast<std::uint64_t>(v);
}

template <typename T>
Json optional_json(const std::optional<T>& v) {
  return v ? Json(*v) : Json(nullptr);
}

}  // namespace

std::string format_number(double value) { return fmt::format("{:.17g}", value); }

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot open for reading", path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::kIo, "cannot open for writing", path.string());
  out << text;
  if (!out) fail(ErrorCode::kIo, "write failed", path.string());
}

std::vector<confidence::ConfidenceRecord> read_confidence_records(std::istream& in) {
  std::vector<confidence::ConfidenceRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const Json obj = parse_json_line(line, line_no);
    confidence::ConfidenceRecord r;
    r.example_id = json_id(obj, line_no);
    if (!obj.contains("token_probs") || !obj["token_probs"].is_array())
      fail(ErrorCode::kParse, "token_probs must be an array", line_context(line_no));
    for (const auto& p : obj["token_probs"]) {
      if (!p.is_number()) fail(ErrorCode::kParse, "token_probs must hold numbers", line_context(line_no));
      r.token_probs.push_back(p.get<double>());
    }
    if (obj.contains("predicted_text") && obj["predicted_text"].is_string())
      r.predicted_text = obj["predicted_text"].get<std::string>();
    records.push_back(std::move(r));
  }
  return records;
}

std::vector<confidence::ConfidenceScore> read_confidence_scores(std::istream& in,
                                                                confidence::Method method_for_records) {
  std::vector<confidence::ConfidenceScore> scores;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const Json obj = parse_json_line(line, line_no);
    if (obj.contains("token_probs")) {
      std::istringstream single(line);
      auto records = read_confidence_records(single);
      scores.push_back(confidence::score(records.front(), method_for_records));
      continue;
    }
    confidence::ConfidenceScore s;
    s.example_id = json_id(obj, line_no);
    if (!obj.contains("method") || !obj["method"].is_string())
      fail(ErrorCode::kParse, "score line needs a method", line_context(line_no));
    s.method = confidence::parse_method(obj["method"].get<std::string>());
    if (!obj.contains("value") || !obj["value"].is_number())
      fail(ErrorCode::kParse, "score line needs a numeric value", line_context(line_no));
    s.value = obj["value"].get<double>();
    scores.push_back(s);
  }
  return scores;
}

void write_confidence_scores(std::ostream& out, std::span<const confidence::ConfidenceScore> scores) {
  for (const auto& s : scores) {
    Json obj;
    obj["example_id"] = s.example_id;
    obj["method"] = confidence::to_string(s.method);
    obj["value"] = s.value;
    out << obj.dump() << '\n';
  }
}

std::vector<curves::TaskMeasurements> parse_measurements(const Json& doc) {
  auto one = [](const Json& obj) {
    curves::TaskMeasurements m;
    try {
      m.task_id = obj.at("task_id").get<std::string>();
      m.budgets = obj.at("budgets").get<std::vector<std::uint64_t>>();
      m.raw_acc = obj.at("raw_acc").get<std::vector<double>>();
      m.zero_shot_acc = obj.contains("zero_shot_acc") ? obj.at("zero_shot_acc").get<double>()
                                                      : (m.raw_acc.empty() ? 0.0 : m.raw_acc.front());
      if (obj.contains("human_level_acc") && !obj.at("human_level_acc").is_null())
        m.human_level_acc = obj.at("human_level_acc").get<double>();
    } catch (const Json::exception& e) {
      fail(ErrorCode::kParse, std::string("invalid task measurements: ") + e.what(), m.task_id);
    }
    curves::validate(m);
    return m;
  };
  std::vector<curves::TaskMeasurements> out;
  if (doc.is_array()) {
    for (const auto& obj : doc) out.push_back(one(obj));
  } else if (doc.is_object()) {
    out.push_back(one(doc));
  } else {
    fail(ErrorCode::kParse, "measurements must be an object or an array of objects");
  }
  return out;
}

CsvTable read_csv(std::istream& in) {
  auto split = [](const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
  };
  CsvTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty() || trim(line).front() == '#') continue;
    auto cells = split(trim(line));
    if (table.header.empty()) {
      table.header = std::move(cells);
      continue;
    }
    if (cells.size() != table.header.size())
      fail(ErrorCode::kParse, "row has " + std::to_string(cells.size()) + " cells, header has " +
                                  std::to_string(table.header.size()),
           line_context(line_no));
    table.rows.push_back(std::move(cells));
  }
  if (table.header.empty()) fail(ErrorCode::kParse, "CSV has no header");
  return table;
}

bool CsvTable::has_column(const std::string& name) const {
  return std::find(header.begin(), header.end(), name) != header.end();
}

std::size_t CsvTable::column(const std::string& name) const {
  auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) fail(ErrorCode::kParse, "CSV lacks column '" + name + "'");
  return static_cast<std::size_t>(it - header.begin());
}

double parse_double(const std::string& text, const std::string& context) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) fail(ErrorCode::kParse, "not a number: '" + text + "'", context);
  return v;
}

std::uint64_t parse_uint(const std::string& text, const std::string& context) {
  std::uint64_t v = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end)
    fail(ErrorCode::kParse, "not a non-negative integer: '" + text + "'", context);
  return v;
}

std::vector<predictor::TaskPoint> read_task_table(std::istream& in) {
  const CsvTable table = read_csv(in);
  const auto id_col = table.column("task_id");
  const auto d_col = table.column("d");
  const auto auc_col = table.column("auc");
  std::vector<predictor::TaskPoint> points;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const std::string ctx = "row=" + std::to_string(r + 1);
    points.push_back({row[id_col], parse_double(row[d_col], ctx), parse_double(row[auc_col], ctx)});
  }
  return points;
}

// ---------------------------------------------------------------------------

Json to_json(const similarity::MetricValue& value) {
  Json j;
  j["task_id"] = value.task_id;
  j["metric"] = similarity::to_string(value.metric);
  j["value"] = value.value;
  j["sample_size"] = value.sample_size;
  j["t"] = value.t;
  j["seed"] = value.seed;
  return j;
}

Json to_json(const confidence::SegmentSelection& selection) {
  Json j;
  j["t"] = selection.t;
  j["seed"] = selection.seed;
  j["segment_size"] = selection.segment_size;
  j["sampled_ids"] = selection.sampled_ids;
  return j;
}

Json to_json(const predictor::RegressionModel& model) {
  Json j;
  j["metric"] = model.metric;
  j["c"] = model.c;
  j["intercept"] = model.intercept;
  j["training_task_ids"] = model.training_task_ids;
  j["diagnostics"] = {{"spearman", optional_json(model.diagnostics.spearman)},
                      {"p_value", optional_json(model.diagnostics.p_value)},
                      {"mean_abs_error", model.diagnostics.mean_abs_error}};
  return j;
}

Json to_json(const predictor::HoldOneOutReport& report) {
  Json tasks = Json::array();
  for (const auto& f : report.folds) {
    Json t;
    t["task_id"] = f.task_id;
    t["metric"] = report.metric;
    t["d"] = f.d;
    t["auc_true"] = f.auc_true;
    t["auc_pred"] = optional_json(f.auc_pred);
    t["abs_error"] = optional_json(f.abs_error);
    t["fold_c"] = optional_json(f.c);
    t["fold_intercept"] = optional_json(f.intercept);
    tasks.push_back(std::move(t));
  }
  Json j;
  j["tasks"] = std::move(tasks);
  j["aggregate"] = {{"mean_abs_error", report.mean_abs_error},
                    {"spearman", optional_json(report.spearman)},
                    {"p_value", optional_json(report.p_value)}};
  j["warnings"] = report.warnings;
  return j;
}

Json to_json(const predictor::BudgetPrediction& p) {
  Json j;
  j["task_id"] = p.task_id;
  j["curve_kind"] = predictor::to_string(p.kind);
  j["auc_prime"] = p.auc_prime;
  j["target"] = p.target;
  j["x_required"] = p.x_required;
  j["n_required"] = p.n_required;
  j["n_snapped"] = p.n_snapped;
  j["n_max"] = p.n_max;
  return j;
}

Json curve_summary(const curves::EfficiencyCurve& curve) {
  Json j;
  j["task_id"] = curve.task_id;
  j["zero_shot_acc"] = curve.zero_shot_acc;
  j["max_attainable"] = curve.max_attainable;
  j["axis_max"] = curve.axis_max;
  j["auc"] = optional_json(curve.auc);
  return j;
}

predictor::RegressionModel regression_from_json(const Json& doc) {
  predictor::RegressionModel model;
  try {
    model.c = doc.at("c").get<double>();
    model.intercept = doc.at("intercept").get<double>();
    if (doc.contains("metric")) model.metric = doc.at("metric").get<std::string>();
    if (doc.contains("training_task_ids"))
      model.training_task_ids = doc.at("training_task_ids").get<std::vector<std::string>>();
  } catch (const Json::exception& e) {
    fail(ErrorCode::kParse, std::string("invalid regression model: ") + e.what());
  }
  return model;
}

}  // namespace effpred::io
