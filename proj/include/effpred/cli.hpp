#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "effpred/io.hpp"

namespace effpred::cli {

/// Resolved settings for one invocation. Defaults follow the standard
/// protocol: 32 sampled examples from the lowest-confidence 10%.
struct RunConfig {
  std::uint64_t seed = 0;
  std::optional<double> t;  ///< unset: 0.1 for cos_low, 1.0 otherwise
  std::size_t sample_size = 32;
  std::string metric = "cos_low";
  std::string curve_kind = "power";
  std::uint64_t n_max = 5000;
  std::vector<std::uint64_t> ladder = predictor::kDefaultLadder;
  std::string confidence_method = "avg_prob";
  double target = 0.9;
  std::optional<double> c;
  std::optional<double> intercept;
  double annotation_cost = 1.0;
  double run_cost = 1.0;
  std::string format = "json";
  std::filesystem::path out_dir = ".";
};

/// Applies `key = value` lines (# starts a comment) on top of `config`.
/// Unknown keys and malformed values raise parse errors.
void apply_config_text(RunConfig& config, std::string_view text);

/// Sets one key; the same keys as the config file.
void apply_setting(RunConfig& config, std::string_view key, std::string_view value);

io::Json to_json(const RunConfig& config);

/// Named regression coefficient sets (slope, intercept) for known model
/// families.
struct CoefficientPreset {
  std::string_view name;
  double c;
  double intercept;
};
std::span<const CoefficientPreset> coefficient_presets() noexcept;

/// Runs one command. `args` excludes the program name. Returns the process
/// exit status; failures write {code, message, context} JSON to `err`.
int run(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace effpred::cli
