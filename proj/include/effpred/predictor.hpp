#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "effpred/curves.hpp"

namespace effpred::predictor {

/// Regressions produce values outside (0, 1); predictions are clamped to
/// [kAucClamp, 1 - kAucClamp] before a curve is instantiated.
inline constexpr double kAucClamp = 0.01;

/// Budget sizes measured during fine-tuning, used for snapping.
inline const std::vector<std::uint64_t> kDefaultLadder{50, 100, 200, 500, 1000, 2500, 5000};

struct TaskPoint {
  std::string task_id;
  double d = 0.0;    ///< task difficulty metric value
  double auc = 0.0;  ///< measured data-efficiency AUC
};

struct Diagnostics {
  std::optional<double> spearman;  ///< between d and auc
  std::optional<double> p_value;   ///< two-sided t-test on the slope; needs >= 3 points
  double mean_abs_error = 0.0;     ///< in-sample residuals
};

struct RegressionModel {
  double c = 0.0;
  double intercept = 0.0;
  std::string metric = "cos_low";
  std::vector<std::string> training_task_ids;
  Diagnostics diagnostics;
};

/// Ordinary least squares auc = c * d + intercept. At least two points with
/// distinct d are required, otherwise a singular-fit error is raised.
RegressionModel fit(std::span<const TaskPoint> points, std::string metric = "cos_low");

double predict_auc(double c, double intercept, double d);
double predict_auc(const RegressionModel& model, double d);

struct FoldResult {
  std::string task_id;
  double d = 0.0;
  double auc_true = 0.0;
  std::optional<double> auc_pred;  ///< absent when the fold was singular
  std::optional<double> abs_error;
  std::optional<double> c;
  std::optional<double> intercept;
};

struct HoldOneOutReport {
  std::string metric;
  std::vector<FoldResult> folds;
  double mean_abs_error = 0.0;     ///< over non-singular folds
  std::optional<double> spearman;  ///< d vs true auc over all tasks
  std::optional<double> p_value;   ///< slope significance of the full fit
  std::vector<std::string> warnings;
};

/// Fits on every task but k and predicts task k, for each k. Fold k never
/// reads task k's auc.
HoldOneOutReport hold_one_out(std::span<const TaskPoint> tasks, std::string metric = "cos_low");

/// Error of the baseline that predicts AUC 0 (no gain before the full
/// budget): mean |auc|.
double base_max_error(std::span<const double> aucs);

// ---------------------------------------------------------------------------

enum class CurveKind { kPower, kPiecewiseLinear };

std::string_view to_string(CurveKind kind) noexcept;
/// Accepts "power" and "piecewise_linear".
CurveKind parse_curve_kind(std::string_view name);

/// Parametric data-efficiency curve on [0, 1] whose area is auc_prime.
///   power:     f(x) = x^p, p = (1 - A) / A
///   piecewise: A >= 0.5: min(x / (2(1 - A)), 1)
///              A <  0.5: max((x - 1) / (2A) + 1, 0)
class CurveFamily {
 public:
  CurveFamily(CurveKind kind, double auc_prime);

  CurveKind kind() const noexcept { return kind_; }
  double auc_prime() const noexcept { return auc_prime_; }
  /// Power exponent p; only meaningful for the power family.
  double exponent() const noexcept { return (1.0 - auc_prime_) / auc_prime_; }

  double operator()(double x) const;

  /// Smallest x with f(x) >= y, for y in (0, 1].
  double inverse(double y) const;

 private:
  CurveKind kind_;
  double auc_prime_;
};

CurveFamily instantiate_curve(CurveKind kind, double auc_prime);

struct BudgetPrediction {
  std::string task_id;
  CurveKind kind = CurveKind::kPower;
  double auc_prime = 0.0;
  double target = 0.0;      ///< y, fraction of max attainable performance
  double x_required = 0.0;  ///< position on the normalized log2 axis
  std::uint64_t n_required = 0;
  std::uint64_t n_snapped = 0;
  std::uint64_t n_max = 5000;
};

/// Inverts the curve at y and maps x back through the curve axis:
///   n = ceil(2^(x * log2(n_max + 1)) - 1), clamped to [1, n_max],
/// then snaps up to the first ladder value >= n (capped at the last rung).
BudgetPrediction required_budget(double auc_prime, double target, std::uint64_t n_max,
                                 std::span<const std::uint64_t> ladder = kDefaultLadder,
                                 CurveKind kind = CurveKind::kPower);

/// Smallest ladder value >= n, or the last rung.
std::uint64_t snap_to_ladder(std::uint64_t n, std::span<const std::uint64_t> ladder);

/// Mean |predicted(x) - actual(x)| over x = i / 1000, i = 0..1000, with the
/// actual curve linearly interpolated.
double curve_fit_error(const std::function<double(double)>& predicted,
                       const curves::EfficiencyCurve& actual);

}  // namespace effpred::predictor
