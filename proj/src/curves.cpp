#include "effpred/curves.hpp"

#include <algorithm>
#include <cmath>

#include "effpred/error.hpp"

namespace effpred::curves {

void validate(const TaskMeasurements& m) {
  const std::string& ctx = m.task_id;
  if (m.budgets.size() != m.raw_acc.size())
    fail(ErrorCode::kValidation, "budgets and raw_acc differ in length", ctx);
  if (m.budgets.size() < 2) fail(ErrorCode::kValidation, "need at least two measurements", ctx);
  if (m.budgets.front() != 0) fail(ErrorCode::kValidation, "budgets must start at 0 (zero-shot)", ctx);
  for (std::size_t i = 1; i < m.budgets.size(); ++i)
    if (m.budgets[i] <= m.budgets[i - 1])
      fail(ErrorCode::kValidation, "budgets must be strictly ascending", ctx);
  for (const double a : m.raw_acc)
    if (!(a >= 0.0 && a <= 1.0)) fail(ErrorCode::kValidation, "accuracy outside [0, 1]", ctx);
  if (std::fabs(m.zero_shot_acc - m.raw_acc.front()) > 1e-9)
    fail(ErrorCode::kValidation, "zero_shot_acc must equal the accuracy at budget 0", ctx);
  if (m.human_level_acc && !(*m.human_level_acc >= 0.0 && *m.human_level_acc <= 1.0))
    fail(ErrorCode::kValidation, "human_level_acc outside [0, 1]", ctx);
}

double max_attainable(const TaskMeasurements& m) {
  double best = *std::max_element(m.raw_acc.begin(), m.raw_acc.end());
  if (m.human_level_acc) best = std::max(best, *m.human_level_acc);
  return best;
}

std::vector<double> monotone_envelope(std::span<const double> raw_acc) {
  std::vector<double> out(raw_acc.begin(), raw_acc.end());
  for (std::size_t i = 1; i < out.size(); ++i) out[i] = std::max(out[i], out[i - 1]);
  return out;
}

double axis_position(std::uint64_t n, std::uint64_t axis_max) {
  if (axis_max == 0) fail(ErrorCode::kValidation, "axis maximum must be positive");
  if (n > axis_max) fail(ErrorCode::kValidation, "budget beyond the axis maximum");
  if (n == axis_max) return 1.0;
  return std::log2(static_cast<double>(n) + 1.0) / std::log2(static_cast<double>(axis_max) + 1.0);
}

EfficiencyCurve normalize(const TaskMeasurements& m, std::optional<std::uint64_t> axis_max) {
  validate(m);
  EfficiencyCurve curve;
  curve.task_id = m.task_id;
  curve.zero_shot_acc = m.zero_shot_acc;
  curve.max_attainable = max_attainable(m);
  curve.axis_max = axis_max.value_or(m.budgets.back());
  if (curve.axis_max < m.budgets.back())
    fail(ErrorCode::kValidation, "axis maximum below the largest measured budget", m.task_id);
  const double span = curve.max_attainable - m.zero_shot_acc;
  if (!(span > 0.0))
    fail(ErrorCode::kDegenerateTask, "max attainable accuracy equals zero-shot; curve undefined", m.task_id);

  const auto envelope = monotone_envelope(m.raw_acc);
  for (std::size_t i = 0; i < envelope.size(); ++i) {
    const double f = std::clamp((envelope[i] - m.zero_shot_acc) / span, 0.0, 1.0);
    curve.points.push_back({m.budgets[i], axis_position(m.budgets[i], curve.axis_max), f});
  }
  curve.points.front().f = 0.0;
  if (curve.points.back().n < curve.axis_max)
    curve.points.push_back({curve.axis_max, 1.0, curve.points.back().f});
  return curve;
}

double auc(const EfficiencyCurve& curve) {
  const auto& p = curve.points;
  if (p.size() < 2) fail(ErrorCode::kValidation, "curve needs at least two points", curve.task_id);
  double area = 0.0;
  for (std::size_t i = 1; i < p.size(); ++i) area += 0.5 * (p[i].f + p[i - 1].f) * (p[i].x - p[i - 1].x);
  return std::clamp(area, 0.0, 1.0);
}

EfficiencyCurve build_curve(const TaskMeasurements& m, std::optional<std::uint64_t> axis_max) {
  auto curve = normalize(m, axis_max);
  curve.auc = auc(curve);
  return curve;
}

double interpolate(const EfficiencyCurve& curve, double x) {
  const auto& p = curve.points;
  if (p.empty()) fail(ErrorCode::kValidation, "empty curve", curve.task_id);
  if (x <= p.front().x) return p.front().f;
  if (x >= p.back().x) return p.back().f;
  auto hi = std::upper_bound(p.begin(), p.end(), x,
                             [](double v, const CurvePoint& pt) { return v < pt.x; });
  auto lo = std::prev(hi);
  const double w = (x - lo->x) / (hi->x - lo->x);
  return lo->f + w * (hi->f - lo->f);
}

}  // namespace effpred::curves
