#include "effpred/predictor.hpp"

#include <algorithm>
#include <cmath>

#include "effpred/error.hpp"
#include "effpred/stats.hpp"

namespace effpred::predictor {
namespace {

struct LineFit {
  double c = 0.0;
  double intercept = 0.0;
  double sxx = 0.0;
  double sse = 0.0;
};

bool all_equal(std::span<const double> values) {
  return std::all_of(values.begin(), values.end(), [&](double v) { return v == values.front(); });
}

LineFit least_squares(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  if (n < 2) fail(ErrorCode::kSingularFit, "regression needs at least two points");
  if (all_equal(x)) fail(ErrorCode::kSingularFit, "all metric values are equal; slope undefined");
  const double mx = stats::mean(x);
  const double my = stats::mean(y);
  LineFit out;
  double sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    out.sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(out.sxx > 0.0)) fail(ErrorCode::kSingularFit, "metric values have no spread");
  out.c = sxy / out.sxx;
  out.intercept = my - out.c * mx;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - (out.c * x[i] + out.intercept);
    out.sse += r * r;
  }
  return out;
}

std::optional<double> slope_p_value(const LineFit& line, std::size_t n) {
  if (n < 3) return std::nullopt;
  const double dof = static_cast<double>(n - 2);
  const double se = std::sqrt(line.sse / dof / line.sxx);
  if (se == 0.0) return line.c == 0.0 ? 1.0 : 0.0;
  return stats::students_t_two_sided_p(line.c / se, dof);
}

void validate_points(std::span<const TaskPoint> points) {
  for (const auto& p : points)
    if (!std::isfinite(p.d) || !std::isfinite(p.auc))
      fail(ErrorCode::kValidation, "non-finite metric or auc", p.task_id);
}

}  // namespace

RegressionModel fit(std::span<const TaskPoint> points, std::string metric) {
  validate_points(points);
  std::vector<double> d, auc;
  for (const auto& p : points) {
    d.push_back(p.d);
    auc.push_back(p.auc);
  }
  const LineFit line = least_squares(d, auc);

  RegressionModel model;
  model.c = line.c;
  model.intercept = line.intercept;
  model.metric = std::move(metric);
  for (const auto& p : points) model.training_task_ids.push_back(p.task_id);
  model.diagnostics.spearman = stats::spearman(d, auc);
  model.diagnostics.p_value = slope_p_value(line, points.size());
  double abs_sum = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) abs_sum += std::fabs(auc[i] - (line.c * d[i] + line.intercept));
  model.diagnostics.mean_abs_error = abs_sum / static_cast<double>(d.size());
  return model;
}

double predict_auc(double c, double intercept, double d) {
  return std::clamp(c * d + intercept, kAucClamp, 1.0 - kAucClamp);
}

double predict_auc(const RegressionModel& model, double d) {
  return predict_auc(model.c, model.intercept, d);
}

HoldOneOutReport hold_one_out(std::span<const TaskPoint> tasks, std::string metric) {
  if (tasks.size() < 3) fail(ErrorCode::kValidation, "hold-one-out needs at least three tasks");
  validate_points(tasks);

  HoldOneOutReport report;
  report.metric = metric;
  std::vector<double> errors;
  for (std::size_t k = 0; k < tasks.size(); ++k) {
    FoldResult fold{tasks[k].task_id, tasks[k].d, tasks[k].auc, {}, {}, {}, {}};
    std::vector<double> d, auc;
    for (std::size_t i = 0; i < tasks.size(); ++i) {
      if (i == k) continue;
      d.push_back(tasks[i].d);
      auc.push_back(tasks[i].auc);
    }
    try {
      const LineFit line = least_squares(d, auc);
      fold.c = line.c;
      fold.intercept = line.intercept;
      fold.auc_pred = predict_auc(line.c, line.intercept, tasks[k].d);
      fold.abs_error = std::fabs(*fold.auc_pred - tasks[k].auc);
      errors.push_back(*fold.abs_error);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kSingularFit) throw;
      report.warnings.push_back("fold '" + tasks[k].task_id + "' is singular and was excluded: " + e.what());
    }
    report.folds.push_back(std::move(fold));
  }
  if (errors.empty()) fail(ErrorCode::kSingularFit, "every hold-one-out fold is singular");
  report.mean_abs_error = stats::mean(errors);

  std::vector<double> d, auc;
  for (const auto& t : tasks) {
    d.push_back(t.d);
    auc.push_back(t.auc);
  }
  report.spearman = stats::spearman(d, auc);
  if (!all_equal(d)) report.p_value = slope_p_value(least_squares(d, auc), tasks.size());
  return report;
}

double base_max_error(std::span<const double> aucs) {
  if (aucs.empty()) fail(ErrorCode::kValidation, "base_max needs at least one task");
  double sum = 0.0;
  for (const double a : aucs) sum += std::fabs(a);
  return sum / static_cast<double>(aucs.size());
}

// ---------------------------------------------------------------------------

std::string_view to_string(CurveKind kind) noexcept {
  return kind == CurveKind::kPower ? "power" : "piecewise_linear";
}

CurveKind parse_curve_kind(std::string_view name) {
  if (name == "power") return CurveKind::kPower;
  if (name == "piecewise_linear" || name == "piecewise") return CurveKind::kPiecewiseLinear;
  fail(ErrorCode::kValidation, "unknown curve kind '" + std::string(name) + "'");
}

CurveFamily::CurveFamily(CurveKind kind, double auc_prime) : kind_(kind), auc_prime_(auc_prime) {
  if (!(auc_prime > 0.0 && auc_prime < 1.0))
    fail(ErrorCode::kDomain, "curve AUC must lie strictly between 0 and 1");
}

double CurveFamily::operator()(double x) const {
  x = std::clamp(x, 0.0, 1.0);
  if (kind_ == CurveKind::kPower) return std::pow(x, exponent());
  if (auc_prime_ >= 0.5) return std::min(x / (2.0 * (1.0 - auc_prime_)), 1.0);
  return std::max((x - 1.0) / (2.0 * auc_prime_) + 1.0, 0.0);
}

double CurveFamily::inverse(double y) const {
  if (!(y > 0.0 && y <= 1.0)) fail(ErrorCode::kDomain, "target performance must lie in (0, 1]");
  if (kind_ == CurveKind::kPower) return std::pow(y, auc_prime_ / (1.0 - auc_prime_));
  if (auc_prime_ >= 0.5) return 2.0 * (1.0 - auc_prime_) * y;
  return 1.0 + 2.0 * auc_prime_ * (y - 1.0);
}

CurveFamily instantiate_curve(CurveKind kind, double auc_prime) { return CurveFamily(kind, auc_prime); }

std::uint64_t snap_to_ladder(std::uint64_t n, std::span<const std::uint64_t> ladder) {
  if (ladder.empty()) fail(ErrorCode::kValidation, "empty budget ladder");
  for (const auto rung : ladder)
    if (rung >= n) return rung;
  return ladder.back();
}

BudgetPrediction required_budget(double auc_prime, double target, std::uint64_t n_max,
                                 std::span<const std::uint64_t> ladder, CurveKind kind) {
  if (n_max == 0) fail(ErrorCode::kValidation, "n_max must be positive");
  for (std::size_t i = 1; i < ladder.size(); ++i)
    if (ladder[i] <= ladder[i - 1]) fail(ErrorCode::kValidation, "ladder must be strictly ascending");
  const CurveFamily curve(kind, auc_prime);

  BudgetPrediction out;
  out.kind = kind;
  out.auc_prime = auc_prime;
  out.target = target;
  out.n_max = n_max;
  out.x_required = std::clamp(curve.inverse(target), 0.0, 1.0);
  const double n_real = std::expm1(out.x_required * std::log(static_cast<double>(n_max) + 1.0));
  // Integral budgets come out as e.g. 5000.000000000001; do not round those up.
  const double n_ceil = std::ceil(n_real - 1e-9 * std::max(1.0, n_real));
  out.n_required = std::clamp<std::uint64_t>(static_cast<std::uint64_t>(std::max(n_ceil, 0.0)), 1, n_max);
  out.n_snapped = snap_to_ladder(out.n_required, ladder);
  return out;
}

double curve_fit_error(const std::function<double(double)>& predicted,
                       const curves::EfficiencyCurve& actual) {
  if (actual.points.size() < 2) fail(ErrorCode::kValidation, "actual curve needs at least two points");
  constexpr int kSteps = 1000;
  double sum = 0.0;
  for (int i = 0; i <= kSteps; ++i) {
    const double x = static_cast<double>(i) / kSteps;
    sum += std::fabs(predicted(x) - curves::interpolate(actual, x));
  }
  return sum / (kSteps + 1);
}

}  // namespace effpred::predictor
