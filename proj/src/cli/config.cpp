#include <sstream>

#include "effpred/cli.hpp"
#include "effpred/error.hpp"

namespace effpred::cli {
namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

constexpr CoefficientPreset kPresets[] = {
    {"llama-3.1-8b-instruct", 0.545, 0.310},
    {"mistral-7b-instruct-v0.3", 0.797, 0.357},
    {"qwen-2.5-14b-instruct", 0.526, 0.305},
};

}  // namespace

std::span<const CoefficientPreset> coefficient_presets() noexcept { return kPresets; }

void apply_setting(RunConfig& config, std::string_view key_view, std::string_view value_view) {
  const std::string key = trim(key_view);
  const std::string value = trim(value_view);
  const std::string ctx = "key=" + key;
  if (key == "seed") {
    config.seed = io::parse_uint(value, ctx);
  } else if (key == "t") {
    config.t = io::parse_double(value, ctx);
  } else if (key == "sample_size") {
    config.sample_size = io::parse_uint(value, ctx);
  } else if (key == "metric") {
    similarity::parse_metric(value);
    config.metric = value;
  } else if (key == "curve_kind") {
    predictor::parse_curve_kind(value);
    config.curve_kind = value;
  } else if (key == "n_max") {
    config.n_max = io::parse_uint(value, ctx);
  } else if (key == "ladder") {
    std::vector<std::uint64_t> ladder;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) ladder.push_back(io::parse_uint(trim(item), ctx));
    config.ladder = std::move(ladder);
  } else if (key == "confidence_method") {
    confidence::parse_method(value);
    config.confidence_method = value;
  } else if (key == "target") {
    config.target = io::parse_double(value, ctx);
  } else if (key == "c") {
    config.c = io::parse_double(value, ctx);
  } else if (key == "intercept") {
    config.intercept = io::parse_double(value, ctx);
  } else if (key == "coefficients") {
    for (const auto& p : kPresets) {
      if (p.name == value) {
        config.c = p.c;
        config.intercept = p.intercept;
        return;
      }
    }
    fail(ErrorCode::kParse, "unknown coefficient preset '" + value + "'", ctx);
  } else if (key == "annotation_cost") {
    config.annotation_cost = io::parse_double(value, ctx);
  } else if (key == "run_cost") {
    config.run_cost = io::parse_double(value, ctx);
  } else if (key == "format") {
    config.format = value;
  } else if (key == "out") {
    config.out_dir = value;
  } else {
    fail(ErrorCode::kParse, "unknown config key '" + key + "'", ctx);
  }
}

void apply_config_text(RunConfig& config, std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      fail(ErrorCode::kParse, "expected key = value", "line=" + std::to_string(line_no));
    apply_setting(config, std::string_view(line).substr(0, eq), std::string_view(line).substr(eq + 1));
  }
}

io::Json to_json(const RunConfig& config) {
  io::Json j;
  j["seed"] = config.seed;
  j["t"] = config.t ? io::Json(*config.t) : io::Json(nullptr);
  j["sample_size"] = config.sample_size;
  j["metric"] = config.metric;
  j["curve_kind"] = config.curve_kind;
  j["n_max"] = config.n_max;
  j["ladder"] = config.ladder;
  j["confidence_method"] = config.confidence_method;
  j["target"] = config.target;
  j["c"] = config.c ? io::Json(*config.c) : io::Json(nullptr);
  j["intercept"] = config.intercept ? io::Json(*config.intercept) : io::Json(nullptr);
  j["annotation_cost"] = config.annotation_cost;
  j["run_cost"] = config.run_cost;
  j["format"] = config.format;
  return j;
}

}  // namespace effpred::cli
