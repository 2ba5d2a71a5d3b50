#include "effpred/cost_model.hpp"

#include <algorithm>
#include <string>

#include "effpred/error.hpp"

namespace effpred::cost {
namespace {

std::size_t rung_index(std::uint64_t budget, std::span<const std::uint64_t> ladder, const char* what) {
  auto it = std::find(ladder.begin(), ladder.end(), budget);
  if (it == ladder.end())
    fail(ErrorCode::kValidation, std::string(what) + " budget " + std::to_string(budget) + " is not on the ladder");
  return static_cast<std::size_t>(it - ladder.begin());
}

void validate_ladder(std::span<const std::uint64_t> ladder) {
  if (ladder.empty()) fail(ErrorCode::kValidation, "empty budget ladder");
  for (std::size_t i = 1; i < ladder.size(); ++i)
    if (ladder[i] <= ladder[i - 1]) fail(ErrorCode::kValidation, "ladder must be strictly ascending");
}

}  // namespace

std::string_view to_string(Strategy s) noexcept {
  switch (s) {
    case Strategy::kIncremental: return "incremental";
    case Strategy::kMaximum: return "maximum";
    case Strategy::kPredictedFirst: return "predicted_first";
  }
  return "unknown";
}

Strategy parse_strategy(std::string_view name) {
  for (const auto s : kAllStrategies)
    if (to_string(s) == name) return s;
  fail(ErrorCode::kValidation, "unknown strategy '" + std::string(name) + "'");
}

CostReport simulate(Strategy strategy, std::uint64_t required, std::optional<std::uint64_t> predicted,
                    const CostParams& params) {
  validate_ladder(params.ladder);
  const std::size_t need = rung_index(required, params.ladder, "required");
  CostReport report;
  report.strategy = strategy;
  switch (strategy) {
    case Strategy::kIncremental:
      report.extra_training_runs = static_cast<double>(need);
      break;
    case Strategy::kMaximum:
      report.extra_annotation = static_cast<double>(params.ladder.back() - required);
      break;
    case Strategy::kPredictedFirst: {
      if (!predicted) fail(ErrorCode::kValidation, "predicted_first needs a predicted budget");
      const std::size_t start = rung_index(*predicted, params.ladder, "predicted");
      if (start >= need) {
        report.extra_annotation = static_cast<double>(*predicted - required);
      } else {
        // Annotations carry over, so an undershoot costs only the extra runs.
        report.extra_training_runs = static_cast<double>(need - start);
      }
      break;
    }
  }
  return report;
}

CostReport aggregate(std::span<const CostReport> reports) {
  if (reports.empty()) fail(ErrorCode::kValidation, "aggregate of no reports");
  CostReport out;
  out.strategy = reports.front().strategy;
  for (const auto& r : reports) {
    if (r.strategy != out.strategy) fail(ErrorCode::kValidation, "aggregate mixes strategies");
    out.extra_annotation += r.extra_annotation;
    out.extra_training_runs += r.extra_training_runs;
  }
  const auto n = static_cast<double>(reports.size());
  out.extra_annotation /= n;
  out.extra_training_runs /= n;
  return out;
}

std::vector<CostReport> compare_strategies(std::span<const TaskRequirement> tasks, const CostParams& params) {
  std::vector<CostReport> means;
  for (const auto s : kAllStrategies) {
    std::vector<CostReport> per_task;
    per_task.reserve(tasks.size());
    for (const auto& t : tasks) per_task.push_back(simulate(s, t.required, t.predicted, params));
    means.push_back(aggregate(per_task));
  }
  return means;
}

}  // namespace effpred::cost
