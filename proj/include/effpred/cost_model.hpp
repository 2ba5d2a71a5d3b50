#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "effpred/predictor.hpp"

namespace effpred::cost {

/// Annotation cost is counted in examples (units of A), training cost in
/// fine-tuning runs (units of C).
struct CostParams {
  double annotation_cost = 1.0;  ///< A
  double run_cost = 1.0;         ///< C
  std::vector<std::uint64_t> ladder = predictor::kDefaultLadder;
};

enum class Strategy { kIncremental, kMaximum, kPredictedFirst };

inline constexpr Strategy kAllStrategies[] = {Strategy::kIncremental, Strategy::kMaximum,
                                              Strategy::kPredictedFirst};

std::string_view to_string(Strategy s) noexcept;
Strategy parse_strategy(std::string_view name);

struct CostReport {
  Strategy strategy = Strategy::kIncremental;
  double extra_annotation = 0.0;  ///< examples annotated beyond the requirement
  double extra_training_runs = 0.0;  ///< runs beyond the final one

  /// extra_annotation * A + extra_training_runs * C
  double total(const CostParams& params) const noexcept {
    return extra_annotation * params.annotation_cost + extra_training_runs * params.run_cost;
  }
};

/// Extra cost of reaching the ground-truth budget under one strategy.
///   incremental:     train at every rung up to the requirement
///   maximum:         annotate the top rung, train once
///   predicted_first: train at the prediction; overshoot wastes annotation,
///                    undershoot continues rung by rung
/// Budgets must be ladder values; `predicted` is required for
/// predicted_first.
CostReport simulate(Strategy strategy, std::uint64_t required, std::optional<std::uint64_t> predicted,
                    const CostParams& params);

/// Per-strategy means over a set of reports (all of one strategy).
CostReport aggregate(std::span<const CostReport> reports);

struct TaskRequirement {
  std::uint64_t required = 0;
  std::uint64_t predicted = 0;
};

/// Mean extras of each strategy over a task set, in kAllStrategies order.
std::vector<CostReport> compare_strategies(std::span<const TaskRequirement> tasks, const CostParams& params);

}  // namespace effpred::cost
