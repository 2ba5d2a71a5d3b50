#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "effpred/cli.hpp"
#include "effpred/error.hpp"

namespace effpred::cli {
namespace {

namespace fs = std::filesystem;
using io::Json;

// Options shared by every command. Each maps onto a config key so that the
// precedence is defaults < --config file < flags.
struct SettingFlags {
  std::map<std::string, std::optional<std::string>> values;

  void attach(CLI::App& app, const std::string& flag, const std::string& key, const std::string& help) {
    app.add_option(flag, values[key], help);
  }

  void apply(RunConfig& config) const {
    for (const auto& [key, value] : values)
      if (value) apply_setting(config, key, *value);
  }
};

struct Inputs {
  std::string config_path;
  std::string input;
  std::string grads;
  std::string confidence;
  std::string table;
  std::string requirements;
  std::string predictions;
  std::string model;
  std::string task_id;
  std::optional<double> d;
  std::optional<double> project_ratio;
  std::vector<std::uint64_t> project_dims;
  bool select = false;
};

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot open input", path);
  return in;
}

void ensure_out_dir(const RunConfig& config) {
  std::error_code ec;
  fs::create_directories(config.out_dir, ec);
  if (ec) fail(ErrorCode::kIo, "cannot create output directory: " + ec.message(), config.out_dir.string());
}

void check_format(const RunConfig& config) {
  if (config.format != "json" && config.format != "csv")
    fail(ErrorCode::kUsage, "--format must be json or csv", config.format);
}

Json envelope(std::string_view command, const RunConfig& config) {
  Json j;
  j["command"] = command;
  j["config"] = to_json(config);
  return j;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

std::string csv_line(std::initializer_list<std::string> cells) {
  std::string line;
  bool first = true;
  for (const auto& c : cells) {
    if (!first) line += ',';
    line += c;
    first = false;
  }
  return line + "\n";
}

std::string num(double v) { return io::format_number(v); }

std::string opt_num(const std::optional<double>& v) { return v ? num(*v) : std::string(); }

similarity::MetricSpec metric_spec(const RunConfig& config) {
  similarity::MetricSpec spec;
  spec.metric = similarity::parse_metric(config.metric);
  spec.t = config.t;
  spec.sample_size = config.sample_size;
  spec.seed = config.seed;
  return spec;
}

std::vector<confidence::ConfidenceScore> load_scores(const std::string& path, const RunConfig& config) {
  if (path.empty()) return {};
  auto in = open_input(path);
  return io::read_confidence_scores(in, confidence::parse_method(config.confidence_method));
}

// Draws the batch from the confidence scores (or the dump ids), then reads
// only the sampled records from the GRDX file.
similarity::MetricValue compute_metric(const Inputs& inputs, const RunConfig& config) {
  const auto spec = metric_spec(config);
  const auto scores = load_scores(inputs.confidence, config);
  const bool needs_grads = spec.metric != similarity::Metric::kConfAvg;
  if (needs_grads && inputs.grads.empty()) fail(ErrorCode::kUsage, "--grads is required for gradient metrics");

  std::vector<std::uint64_t> available;
  if (scores.empty() && !inputs.grads.empty()) {
    auto in = open_input(inputs.grads);
    grdx::GrdxReader reader(in);
    grdx::GradientRecord record;
    while (reader.next(record)) available.push_back(record.example_id);
  }
  const auto selection = similarity::select_sample(scores, available, spec);

  grdx::GradDump batch;
  if (needs_grads) {
    auto in = open_input(inputs.grads);
    batch = grdx::gather(in, selection.sampled_ids);
    if (inputs.project_ratio || !inputs.project_dims.empty()) {
      similarity::ProjectionConfig projection;
      projection.reduction_ratio = inputs.project_ratio;
      projection.target_dims = inputs.project_dims;
      projection.seed = config.seed;
      batch = similarity::project_gradients(batch, projection);
    }
  }
  std::string task_id = inputs.task_id;
  if (task_id.empty()) task_id = inputs.grads.empty() ? "task" : fs::path(inputs.grads).stem().string();
  return similarity::evaluate_metric(task_id, spec, selection, batch, scores);
}

// ---------------------------------------------------------------------------

void cmd_confidence(const Inputs& inputs, const RunConfig& config, std::ostream& out) {
  if (inputs.input.empty()) fail(ErrorCode::kUsage, "--input is required");
  auto in = open_input(inputs.input);
  const auto scores = io::read_confidence_scores(in, confidence::parse_method(config.confidence_method));
  ensure_out_dir(config);

  std::ostringstream body;
  if (config.format == "csv") {
    body << "example_id,method,value\n";
    for (const auto& s : scores)
      body << s.example_id << ',' << confidence::to_string(s.method) << ',' << num(s.value) << '\n';
    io::write_text_file(config.out_dir / "confidence.csv", body.str());
  } else {
    io::write_confidence_scores(body, scores);
    io::write_text_file(config.out_dir / "confidence.jsonl", body.str());
  }

  Json report = envelope("confidence", config);
  report["n_examples"] = scores.size();
  if (inputs.select) {
    const auto selection = confidence::select_low_confidence(
        scores, config.t.value_or(0.1), config.sample_size, config.seed);
    report["selection"] = io::to_json(selection);
    io::write_text_file(config.out_dir / "selection.json", dump(report));
  }
  out << dump(report);
}

void cmd_metric(const Inputs& inputs, const RunConfig& config, std::ostream& out) {
  const auto value = compute_metric(inputs, config);
  ensure_out_dir(config);
  Json report = envelope("metric", config);
  report["result"] = io::to_json(value);
  if (config.format == "csv") {
    std::string text = "task_id,metric,value,sample_size,t,seed\n";
    text += csv_line({value.task_id, std::string(similarity::to_string(value.metric)), num(value.value),
                      std::to_string(value.sample_size), num(value.t), std::to_string(value.seed)});
    io::write_text_file(config.out_dir / "metric.csv", text);
  } else {
    io::write_text_file(config.out_dir / "metric.json", dump(report));
  }
  out << dump(report);
}

void cmd_curve(const Inputs& inputs, const RunConfig& config, std::ostream& out) {
  if (inputs.input.empty()) fail(ErrorCode::kUsage, "--input is required");
  Json doc;
  try {
    doc = Json::parse(io::read_text_file(inputs.input));
  } catch (const Json::parse_error& e) {
    fail(ErrorCode::kParse, std::string("invalid JSON: ") + e.what(), inputs.input);
  }
  const auto tasks = io::parse_measurements(doc);
  ensure_out_dir(config);

  std::string csv = "task_id,n,x,f\n";
  Json summaries = Json::array();
  for (const auto& m : tasks) {
    const auto curve = curves::build_curve(m, config.n_max);
    for (const auto& p : curve.points)
      csv += csv_line({curve.task_id, std::to_string(p.n), num(p.x), num(p.f)});
    summaries.push_back(io::curve_summary(curve));
  }
  Json report = envelope("curve", config);
  report["curves"] = std::move(summaries);
  io::write_text_file(config.out_dir / "curve.csv", csv);
  io::write_text_file(config.out_dir / "curve_summary.json", dump(report));
  out << dump(report);
}

std::vector<predictor::TaskPoint> load_table(const Inputs& inputs) {
  if (inputs.table.empty()) fail(ErrorCode::kUsage, "--table is required");
  auto in = open_input(inputs.table);
  return io::read_task_table(in);
}

void cmd_fit(const Inputs& inputs, const RunConfig& config, std::ostream& out) {
  const auto points = load_table(inputs);
  const auto model = predictor::fit(points, config.metric);
  ensure_out_dir(config);
  Json report = envelope("fit", config);
  report["model"] = io::to_json(model);
  if (config.format == "csv") {
    std::string text = "metric,c,intercept,n_tasks,spearman,p_value,mean_abs_error\n";
    text += csv_line({model.metric, num(model.c), num(model.intercept), std::to_string(points.size()),
                      opt_num(model.diagnostics.spearman), opt_num(model.diagnostics.p_value),
                      num(model.diagnostics.mean_abs_error)});
    io::write_text_file(config.out_dir / "regression.csv", text);
  } else {
    io::write_text_file(config.out_dir / "regression.json", dump(report));
  }
  out << dump(report);
}

void cmd_eval(const Inputs& inputs, const RunConfig& config, std::ostream& out, std::ostream& err) {
  const auto points = load_table(inputs);
  const auto result = predictor::hold_one_out(points, config.metric);
  std::vector<double> aucs;
  for (const auto& p : points) aucs.push_back(p.auc);
  ensure_out_dir(config);

  Json report = envelope("eval", config);
  report["evaluation"] = io::to_json(result);
  report["base_max"] = {{"mean_abs_error", predictor::base_max_error(aucs)}};
  for (const auto& w : result.warnings) err << "warning: " << w << '\n';

  std::string csv = "task_id,metric,d,auc_true,auc_pred,abs_error\n";
  for (const auto& f : result.folds)
    csv += csv_line({f.task_id, result.metric, num(f.d), num(f.auc_true), opt_num(f.auc_pred), opt_num(f.abs_error)});
  io::write_text_file(config.out_dir / "eval.csv", csv);
  io::write_text_file(config.out_dir / "eval.json", dump(report));
  out << dump(report);
}

void cmd_predict(const Inputs& inputs, const RunConfig& config, std::ostream& out) {
  double c = 0.0, intercept = 0.0;
  std::string coefficient_source;
  if (!inputs.model.empty()) {
    Json doc;
    try {
      doc = Json::parse(io::read_text_file(inputs.model));
    } catch (const Json::parse_error& e) {
      fail(ErrorCode::kParse, std::string("invalid JSON: ") + e.what(), inputs.model);
    }
    const auto model = io::regression_from_json(doc.contains("model") ? doc["model"] : doc);
    c = model.c;
    intercept = model.intercept;
    coefficient_source = inputs.model;
  } else if (config.c && config.intercept) {
    c = *config.c;
    intercept = *config.intercept;
    coefficient_source = "config";
  } else {
    fail(ErrorCode::kUsage, "regression coefficients required: --model, --c/--intercept or --coefficients");
  }

  Json report = envelope("predict", config);
  double d = 0.0;
  std::string task_id = inputs.task_id;
  if (inputs.d) {
    d = *inputs.d;
  } else if (!inputs.grads.empty()) {
    const auto metric = compute_metric(inputs, config);
    d = metric.value;
    if (task_id.empty()) task_id = metric.task_id;
    report["metric"] = io::to_json(metric);
  } else {
    fail(ErrorCode::kUsage, "either --d or --grads is required");
  }

  const double auc_prime = predictor::predict_auc(c, intercept, d);
  auto prediction = predictor::required_budget(auc_prime, config.target, config.n_max, config.ladder,
                                               predictor::parse_curve_kind(config.curve_kind));
  prediction.task_id = task_id;
  report["coefficients"] = {{"c", c}, {"intercept", intercept}, {"source", coefficient_source}};
  report["d"] = d;
  report["auc_unclamped"] = c * d + intercept;
  report["prediction"] = io::to_json(prediction);

  ensure_out_dir(config);
  if (config.format == "csv") {
    std::string text = "task_id,d,auc_prime,target,x_required,n_required,n_snapped,n_max\n";
    text += csv_line({prediction.task_id, num(d), num(prediction.auc_prime), num(prediction.target),
                      num(prediction.x_required), std::to_string(prediction.n_required),
                      std::to_string(prediction.n_snapped), std::to_string(prediction.n_max)});
    io::write_text_file(config.out_dir / "prediction.csv", text);
  } else {
    io::write_text_file(config.out_dir / "prediction.json", dump(report));
  }
  out << dump(report);
}

void cmd_cost(const Inputs& inputs, const RunConfig& config, std::ostream& out) {
  if (inputs.requirements.empty()) fail(ErrorCode::kUsage, "--requirements is required");
  auto req_in = open_input(inputs.requirements);
  const auto req = io::read_csv(req_in);
  const auto task_col = req.column("task_id");
  const auto level_col = req.column("level");
  const auto required_col = req.column("required");

  std::map<std::pair<std::string, std::string>, std::uint64_t> predicted;
  if (!inputs.predictions.empty()) {
    auto pred_in = open_input(inputs.predictions);
    const auto pred = io::read_csv(pred_in);
    const auto pt = pred.column("task_id"), pl = pred.column("level"), pp = pred.column("predicted");
    for (std::size_t r = 0; r < pred.rows.size(); ++r)
      predicted[{pred.rows[r][pt], pred.rows[r][pl]}] =
          io::parse_uint(pred.rows[r][pp], "predictions row=" + std::to_string(r + 1));
  } else if (req.has_column("predicted")) {
    const auto pp = req.column("predicted");
    for (std::size_t r = 0; r < req.rows.size(); ++r)
      predicted[{req.rows[r][task_col], req.rows[r][level_col]}] =
          io::parse_uint(req.rows[r][pp], "requirements row=" + std::to_string(r + 1));
  } else {
    fail(ErrorCode::kUsage, "predicted budgets missing: pass --predictions or a predicted column");
  }

  // Levels are kept in first-seen order, which is the row order of Table-3-style inputs.
  std::vector<std::string> levels;
  std::map<std::string, std::vector<cost::TaskRequirement>> by_level;
  for (std::size_t r = 0; r < req.rows.size(); ++r) {
    const auto& row = req.rows[r];
    const std::string ctx = "requirements row=" + std::to_string(r + 1);
    auto it = predicted.find({row[task_col], row[level_col]});
    if (it == predicted.end())
      fail(ErrorCode::kConsistency, "no prediction for task '" + row[task_col] + "' at level " + row[level_col], ctx);
    if (!by_level.contains(row[level_col])) levels.push_back(row[level_col]);
    by_level[row[level_col]].push_back({io::parse_uint(row[required_col], ctx), it->second});
  }

  cost::CostParams params;
  params.annotation_cost = config.annotation_cost;
  params.run_cost = config.run_cost;
  params.ladder = config.ladder;

  std::string csv =
      "level,n_tasks,incremental_extra_annotation,incremental_extra_training,maximum_extra_annotation,"
      "maximum_extra_training,predicted_first_extra_annotation,predicted_first_extra_training\n";
  Json rows = Json::array();
  for (const auto& level : levels) {
    const auto& tasks = by_level[level];
    const auto means = cost::compare_strategies(tasks, params);
    csv += csv_line({level, std::to_string(tasks.size()), num(means[0].extra_annotation),
                     num(means[0].extra_training_runs), num(means[1].extra_annotation),
                     num(means[1].extra_training_runs), num(means[2].extra_annotation),
                     num(means[2].extra_training_runs)});
    Json row;
    row["level"] = level;
    row["n_tasks"] = tasks.size();
    for (const auto& m : means)
      row[std::string(cost::to_string(m.strategy))] = {{"extra_annotation", m.extra_annotation},
                                                       {"extra_training_runs", m.extra_training_runs},
                                                       {"total_cost", m.total(params)}};
    rows.push_back(std::move(row));
  }
  Json report = envelope("cost", config);
  report["levels"] = std::move(rows);
  ensure_out_dir(config);
  io::write_text_file(config.out_dir / "cost.csv", csv);
  io::write_text_file(config.out_dir / "cost.json", dump(report));
  out << dump(report);
}

void report_error(std::ostream& err, ErrorCode code, const std::string& message, const std::string& context) {
  Json j;
  j["code"] = to_string(code);
  j["status"] = static_cast<int>(code);
  j["message"] = message;
  j["context"] = context;
  err << j.dump() << '\n';
}

}  // namespace

int run(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Predict fine-tuning data requirements from gradient and confidence metrics", "effpred"};
  app.require_subcommand(1);
  app.fallthrough();

  Inputs inputs;
  SettingFlags flags;
  app.add_option("--config", inputs.config_path, "key = value settings file; flags override it");
  flags.attach(app, "--seed", "seed", "Sampling seed");
  flags.attach(app, "--out", "out", "Output directory");
  flags.attach(app, "--format", "format", "Report format: json or csv");

  auto* confidence_cmd = app.add_subcommand("confidence", "Score confidence JSONL and optionally draw the low-confidence sample");
  auto* metric_cmd = app.add_subcommand("metric", "Compute a task metric from a GRDX dump");
  auto* curve_cmd = app.add_subcommand("curve", "Build data-efficiency curves and AUC");
  auto* fit_cmd = app.add_subcommand("fit", "Fit metric -> AUC regression");
  auto* eval_cmd = app.add_subcommand("eval", "Hold-one-out evaluation of the regression");
  auto* predict_cmd = app.add_subcommand("predict", "Predict the fine-tuning budget for a target");
  auto* cost_cmd = app.add_subcommand("cost", "Compare annotation/training cost of strategies");

  for (auto* cmd : {confidence_cmd, metric_cmd, predict_cmd}) {
    flags.attach(*cmd, "--t", "t", "Low-confidence fraction");
    flags.attach(*cmd, "--sample-size", "sample_size", "Examples per metric batch");
    flags.attach(*cmd, "--method", "confidence_method", "Confidence method: avg_prob or ppl");
  }
  confidence_cmd->add_option("--input", inputs.input, "Confidence JSONL")->required();
  confidence_cmd->add_flag("--select", inputs.select, "Also draw the low-confidence sample");

  for (auto* cmd : {metric_cmd, predict_cmd}) {
    cmd->add_option("--grads", inputs.grads, "GRDX gradient dump");
    cmd->add_option("--confidence", inputs.confidence, "Confidence JSONL (scores or token_probs)");
    cmd->add_option("--task-id", inputs.task_id, "Task id for the report");
    cmd->add_option("--project-ratio", inputs.project_ratio, "Random projection reduction ratio");
    cmd->add_option("--project-dims", inputs.project_dims, "Explicit per-layer projection dims")->delimiter(',');
  }
  for (auto* cmd : {metric_cmd, predict_cmd, fit_cmd, eval_cmd})
    flags.attach(*cmd, "--metric", "metric", "grad_norm, conf_avg, cos_sim or cos_low");

  curve_cmd->add_option("--input", inputs.input, "Task measurement JSON")->required();
  for (auto* cmd : {curve_cmd, predict_cmd}) flags.attach(*cmd, "--n-max", "n_max", "Maximum budget");

  fit_cmd->add_option("--table", inputs.table, "CSV with task_id,d,auc")->required();
  eval_cmd->add_option("--table", inputs.table, "CSV with task_id,d,auc")->required();

  predict_cmd->add_option("--d", inputs.d, "Metric value");
  predict_cmd->add_option("--model", inputs.model, "Regression JSON written by fit");
  flags.attach(*predict_cmd, "--c", "c", "Regression slope");
  flags.attach(*predict_cmd, "--intercept", "intercept", "Regression intercept");
  flags.attach(*predict_cmd, "--coefficients", "coefficients", "Named coefficient preset");
  flags.attach(*predict_cmd, "--target", "target", "Target fraction of max attainable performance");
  flags.attach(*predict_cmd, "--curve-kind", "curve_kind", "power or piecewise_linear");
  for (auto* cmd : {predict_cmd, cost_cmd}) flags.attach(*cmd, "--ladder", "ladder", "Comma-separated budget ladder");

  cost_cmd->add_option("--requirements", inputs.requirements, "CSV task_id,level,required[,predicted]")->required();
  cost_cmd->add_option("--predictions", inputs.predictions, "CSV task_id,level,predicted");
  flags.attach(*cost_cmd, "--annotation-cost", "annotation_cost", "Cost A per annotated example");
  flags.attach(*cost_cmd, "--run-cost", "run_cost", "Cost C per training run");

  try {
    app.parse(std::vector<std::string>(args.rbegin(), args.rend()));
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    report_error(err, ErrorCode::kUsage, e.what(), "");
    return static_cast<int>(ErrorCode::kUsage);
  }

  try {
    RunConfig config;
    if (!inputs.config_path.empty()) apply_config_text(config, io::read_text_file(inputs.config_path));
    flags.apply(config);
    check_format(config);

    if (confidence_cmd->parsed()) cmd_confidence(inputs, config, out);
    else if (metric_cmd->parsed()) cmd_metric(inputs, config, out);
    else if (curve_cmd->parsed()) cmd_curve(inputs, config, out);
    else if (fit_cmd->parsed()) cmd_fit(inputs, config, out);
    else if (eval_cmd->parsed()) cmd_eval(inputs, config, out, err);
    else if (predict_cmd->parsed()) cmd_predict(inputs, config, out);
    else if (cost_cmd->parsed()) cmd_cost(inputs, config, out);
    return 0;
  } catch (const Error& e) {
    report_error(err, e.code(), e.what(), e.context());
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    report_error(err, ErrorCode::kIo, e.what(), "");
    return static_cast<int>(ErrorCode::kIo);
  }
}

}  // namespace effpred::cli
