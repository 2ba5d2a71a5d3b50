#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "effpred/error.hpp"
#include "effpred/predictor.hpp"
#include "effpred/rng.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace effpred;
using namespace effpred::predictor;

namespace {

std::vector<TaskPoint> line_points(double c, double intercept, const std::vector<double>& ds) {
  std::vector<TaskPoint> out;
  for (std::size_t i = 0; i < ds.size(); ++i) out.push_back({"t" + std::to_string(i), ds[i], c * ds[i] + intercept});
  return out;
}

curves::EfficiencyCurve sampled_curve(const std::function<double(double)>& f, int intervals) {
  curves::EfficiencyCurve c;
  for (int i = 0; i <= intervals; ++i) {
    const double x = static_cast<double>(i) / intervals;
    c.points.push_back({0, x, f(x)});
  }
  return c;
}

}  // namespace

TEST(Predictor, ExactLineFit) {
  const auto pts = line_points(0.5, 0.3, {0.1, 0.4, 0.2, 0.9, 0.7});
  const auto model = fit(pts);
  EXPECT_NEAR(model.c, 0.5, 1e-12);
  EXPECT_NEAR(model.intercept, 0.3, 1e-12);
  EXPECT_NEAR(model.diagnostics.mean_abs_error, 0.0, 1e-12);
  EXPECT_DOUBLE_EQ(*model.diagnostics.spearman, 1.0);
  EXPECT_LT(*model.diagnostics.p_value, 1e-6);
  EXPECT_EQ(model.training_task_ids.size(), 5u);

  const std::vector<TaskPoint> two{{"a", 0.2, 0.4}, {"b", 0.6, 0.2}};
  const auto m2 = fit(two);
  EXPECT_NEAR(m2.c, -0.5, 1e-12);
  EXPECT_NEAR(m2.intercept, 0.5, 1e-12);
  EXPECT_FALSE(m2.diagnostics.p_value.has_value());
}

TEST(Predictor, SingularFit) {
  const std::vector<TaskPoint> same{{"a", 0.3, 0.1}, {"b", 0.3, 0.5}, {"c", 0.3, 0.9}};
  try {
    fit(same);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSingularFit);
  }
  EXPECT_THROW(fit(std::vector<TaskPoint>{{"a", 0.3, 0.1}}), Error);
}

TEST(Predictor, PredictAucClamp) {
  EXPECT_DOUBLE_EQ(predict_auc(0.545, 0.310, 0.0), 0.310);
  EXPECT_NEAR(predict_auc(0.545, 0.310, 0.4), 0.528, 1e-15);
  EXPECT_EQ(predict_auc(1.0, 0.9, 0.5), 0.99);
  EXPECT_EQ(predict_auc(1.0, -0.5, 0.1), 0.01);
}

TEST(Predictor, HoldOneOutOnCollinearData) {
  const auto pts = line_points(0.5, 0.3, {0.1, 0.4, 0.2, 0.9, 0.7, 0.55});
  const auto report = hold_one_out(pts);
  EXPECT_NEAR(report.mean_abs_error, 0.0, 1e-12);
  EXPECT_DOUBLE_EQ(*report.spearman, 1.0);
  EXPECT_TRUE(report.warnings.empty());
  for (const auto& fold : report.folds) {
    EXPECT_NEAR(*fold.c, 0.5, 1e-12);
    EXPECT_NEAR(*fold.intercept, 0.3, 1e-12);
  }
}

TEST(Predictor, HoldOneOutRecoversReferenceCoefficients) {
  std::vector<TaskPoint> pts;
  for (const auto& t : fixtures::reference_tasks()) pts.push_back({t.task_id, (t.auc - 0.310) / 0.545, t.auc});
  ASSERT_EQ(pts.size(), 30u);
  const auto report = hold_one_out(pts);
  EXPECT_NEAR(report.mean_abs_error, 0.0, 1e-12);
  for (const auto& fold : report.folds) {
    EXPECT_NEAR(*fold.c, 0.545, 1e-9) << fold.task_id;
    EXPECT_NEAR(*fold.intercept, 0.310, 1e-9) << fold.task_id;
  }
}

TEST(Predictor, HoldOneOutNeverReadsHeldOutAuc) {
  std::mt19937_64 rng(3);
  std::vector<TaskPoint> pts;
  for (int i = 0; i < 12; ++i) pts.push_back({"t" + std::to_string(i), uniform_unit(rng), uniform_unit(rng)});
  const auto base = hold_one_out(pts);
  for (std::size_t k = 0; k < pts.size(); ++k) {
    auto corrupted = pts;
    corrupted[k].auc = 1e6 * (k + 1);
    const auto report = hold_one_out(corrupted);
    EXPECT_EQ(*report.folds[k].auc_pred, *base.folds[k].auc_pred);
    EXPECT_EQ(*report.folds[k].c, *base.folds[k].c);
  }
}

TEST(Predictor, SingularFoldIsFlaggedAndExcluded) {
  // Removing "odd" leaves three tasks with identical d.
  const std::vector<TaskPoint> pts{{"a", 0.2, 0.3}, {"b", 0.2, 0.4}, {"c", 0.2, 0.5}, {"odd", 0.8, 0.9}};
  const auto report = hold_one_out(pts);
  EXPECT_FALSE(report.folds[3].auc_pred.has_value());
  EXPECT_EQ(report.warnings.size(), 1u);
  EXPECT_TRUE(report.folds[0].auc_pred.has_value());
}

TEST(Predictor, SpearmanInvariantToMonotoneTransform) {
  std::mt19937_64 rng(8);
  std::vector<TaskPoint> pts, transformed;
  for (int i = 0; i < 15; ++i) {
    const double d = uniform_unit(rng);
    const double a = 0.3 * d + 0.2 * uniform_unit(rng);
    pts.push_back({"t", d, a});
    transformed.push_back({"t", std::exp(5 * d) + 3, a});
  }
  EXPECT_EQ(*hold_one_out(pts).spearman, *hold_one_out(transformed).spearman);
}

TEST(Predictor, BaseMax) {
  EXPECT_EQ(base_max_error(std::vector<double>{0, 0, 0}), 0.0);
  EXPECT_DOUBLE_EQ(base_max_error(std::vector<double>{0.2, 0.4}), 0.3);
  std::vector<double> aucs;
  for (const auto& t : fixtures::reference_tasks()) aucs.push_back(t.auc);
  EXPECT_NEAR(base_max_error(aucs), 0.424, 0.001);
}

TEST(Predictor, CurveFamilies) {
  const auto lin = instantiate_curve(CurveKind::kPower, 0.5);
  EXPECT_DOUBLE_EQ(lin.exponent(), 1.0);
  EXPECT_DOUBLE_EQ(lin(0.37), 0.37);
  const auto cube = instantiate_curve(CurveKind::kPower, 0.25);
  EXPECT_DOUBLE_EQ(cube.exponent(), 3.0);
  EXPECT_DOUBLE_EQ(cube(0.5), 0.125);
  EXPECT_DOUBLE_EQ(instantiate_curve(CurveKind::kPiecewiseLinear, 0.75)(0.25), 0.5);
  EXPECT_DOUBLE_EQ(instantiate_curve(CurveKind::kPiecewiseLinear, 0.25)(0.75), 0.5);
  for (double bad : {0.0, 1.0, -0.2, 1.5}) {
    try {
      instantiate_curve(CurveKind::kPower, bad);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kDomain);
    }
  }
}

TEST(Predictor, CurveAreaAndInverse) {
  for (double a = 0.02; a < 0.99; a += 0.0625) {
    for (auto kind : {CurveKind::kPower, CurveKind::kPiecewiseLinear}) {
      const auto f = instantiate_curve(kind, a);
      std::vector<double> breaks;
      if (kind == CurveKind::kPiecewiseLinear) breaks.push_back(a >= 0.5 ? 2 * (1 - a) : 1 - 2 * a);
      EXPECT_NEAR(oracle::integrate([&](double x) { return f(x); }, breaks), a, 1e-6) << a;
      for (double y : {0.1, 0.5, 0.9, 1.0}) EXPECT_NEAR(f(f.inverse(y)), y, 1e-9);
    }
  }
}

TEST(Predictor, RequiredBudget) {
  const auto p = required_budget(0.5, 0.9, 5000);
  EXPECT_DOUBLE_EQ(p.x_required, 0.9);
  EXPECT_EQ(p.n_required, 2133u);
  EXPECT_EQ(p.n_snapped, 2500u);

  const auto full = required_budget(0.3, 1.0, 5000);
  EXPECT_EQ(full.x_required, 1.0);
  EXPECT_EQ(full.n_required, 5000u);
  EXPECT_EQ(full.n_snapped, 5000u);

  const auto early = required_budget(0.99, 0.9, 5000);
  EXPECT_LT(early.x_required, 1e-4);
  EXPECT_EQ(early.n_required, 1u);
  EXPECT_EQ(early.n_snapped, 50u);
}

TEST(Predictor, BudgetMonotoneInAuc) {
  for (auto kind : {CurveKind::kPower, CurveKind::kPiecewiseLinear}) {
    for (double y : {0.5, 0.8, 0.9, 0.95}) {
      std::uint64_t prev = 5000;
      for (double a = 0.01; a <= 0.99; a += 0.01) {
        const auto p = required_budget(a, y, 5000, kDefaultLadder, kind);
        EXPECT_LE(p.n_required, prev) << a << " " << y;
        prev = p.n_required;
      }
    }
  }
}

TEST(Predictor, SnapToLadder) {
  EXPECT_EQ(snap_to_ladder(1, kDefaultLadder), 50u);
  EXPECT_EQ(snap_to_ladder(50, kDefaultLadder), 50u);
  EXPECT_EQ(snap_to_ladder(51, kDefaultLadder), 100u);
  EXPECT_EQ(snap_to_ladder(9000, kDefaultLadder), 5000u);
}

TEST(Predictor, CurveFitError) {
  const auto identity = sampled_curve([](double x) { return x; }, 1);
  EXPECT_NEAR(curve_fit_error(instantiate_curve(CurveKind::kPower, 0.5), identity), 0.0, 1e-15);
  const auto one = sampled_curve([](double) { return 1.0; }, 1);
  EXPECT_NEAR(curve_fit_error([](double x) { return x; }, one), 0.5, 1e-12);
  const auto square = sampled_curve([](double x) { return x * x; }, 10000);
  EXPECT_NEAR(curve_fit_error([](double x) { return x; }, square), 1.0 / 6.0, 2e-4);
}
