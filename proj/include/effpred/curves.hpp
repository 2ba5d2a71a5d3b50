#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace effpred::curves {

/// Accuracy of one task measured at increasing fine-tuning budgets.
struct TaskMeasurements {
  std::string task_id;
  std::vector<std::uint64_t> budgets;  ///< strictly ascending, starts at 0
  std::vector<double> raw_acc;         ///< aligned with budgets, in [0, 1]
  double zero_shot_acc = 0.0;          ///< equals raw_acc[0]
  std::optional<double> human_level_acc;
};

void validate(const TaskMeasurements& m);

struct CurvePoint {
  std::uint64_t n = 0;  ///< budget; the axis end when extrapolated
  double x = 0.0;       ///< position on the log2 axis, in [0, 1]
  double f = 0.0;       ///< normalized accuracy, in [0, 1]
};

struct EfficiencyCurve {
  std::string task_id;
  std::vector<CurvePoint> points;
  double zero_shot_acc = 0.0;
  double max_attainable = 0.0;
  std::uint64_t axis_max = 0;
  std::optional<double> auc;
};

/// max(human level, best observed accuracy).
double max_attainable(const TaskMeasurements& m);

/// Running maximum.
std::vector<double> monotone_envelope(std::span<const double> raw_acc);

/// log2(n + 1) / log2(axis_max + 1).
double axis_position(std::uint64_t n, std::uint64_t axis_max);

/// Maps the envelope to [0, 1] between zero-shot and max attainable on the
/// log2 budget axis. `axis_max` defaults to the largest measured budget;
/// when the task's data stops short of it, the last value is held flat to
/// x = 1. Throws a degenerate-task error if max attainable equals zero-shot.
EfficiencyCurve normalize(const TaskMeasurements& m, std::optional<std::uint64_t> axis_max = {});

/// Trapezoidal area under the piecewise-linear curve over [0, 1].
double auc(const EfficiencyCurve& curve);

/// normalize followed by auc, with the area stored on the curve.
EfficiencyCurve build_curve(const TaskMeasurements& m, std::optional<std::uint64_t> axis_max = {});

/// Linear interpolation of the curve at x in [0, 1].
double interpolate(const EfficiencyCurve& curve, double x);

}  // namespace effpred::curves
