// Acceptance suite: one line per criterion, nonzero exit if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/core.h>

#include "effpred/cost_model.hpp"
#include "effpred/curves.hpp"
#include "effpred/grad_store.hpp"
#include "effpred/predictor.hpp"
#include "effpred/rng.hpp"
#include "effpred/similarity.hpp"
#include "effpred/simd/kernels.hpp"
#include "effpred/stats.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace effpred;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(const char* name, const Outcome& o) {
  std::printf("%s  %-28s %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
  std::fflush(stdout);
  if (!o.pass) ++failures;
}

template <typename F>
void criterion(const char* name, F&& body) {
  try {
    report(name, body());
  } catch (const std::exception& e) {
    report(name, {false, std::string("exception: ") + e.what()});
  }
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::vector<similarity::VectorView> views(const std::vector<std::vector<float>>& vs) { return {vs.begin(), vs.end()}; }

// Batch whose vectors share a random amount of a common direction, so the
// medians spread over (-0.1, 1) instead of clustering at 0.
std::vector<std::vector<float>> random_batch(std::mt19937_64& rng, GaussianStream& gauss, std::size_t n,
                                             std::size_t dim) {
  const double shared = uniform_unit(rng);
  const auto common = fixtures::gaussian_vector(gauss, dim);
  std::vector<std::vector<float>> batch;
  for (std::size_t i = 0; i < n; ++i) {
    auto v = fixtures::gaussian_vector(gauss, dim);
    for (std::size_t k = 0; k < dim; ++k) v[k] += static_cast<float>(shared * common[k]);
    batch.push_back(std::move(v));
  }
  return batch;
}

Outcome cosine_oracle() {
  std::mt19937_64 rng(101);
  GaussianStream gauss(102);
  double library_seconds = 0.0, worst_rel = 0.0;
  std::size_t max_dim = 0;
  for (int b = 0; b < 100; ++b) {
    const std::size_t n = b == 0 ? 32 : 2 + uniform_below(rng, 31);
    // log-uniform dims over [10, 1e6]; the first batch is the full-size case
    const std::size_t dim = b == 0 ? 1'000'000 : static_cast<std::size_t>(std::round(std::pow(10.0, 1.0 + 5.0 * uniform_unit(rng))));
    max_dim = std::max(max_dim, dim);
    const auto batch = random_batch(rng, gauss, n, dim);
    const auto start = std::chrono::steady_clock::now();
    const double got = similarity::cosine_median(views(batch));
    library_seconds += seconds_since(start);
    const double want = oracle::cosine_median(batch);
    worst_rel = std::max(worst_rel, std::fabs(got - want) / std::max(std::fabs(want), 1e-12));
  }
  return {worst_rel <= 1e-5 && library_seconds < 60.0,
          fmt::format("max rel err {:.3g} (tol 1e-5), cosine_median time {:.2f}s (limit 60s), max dim {}, kernels {}",
                      worst_rel, library_seconds, max_dim, simd::active().name)};
}

Outcome scale_permutation() {
  std::mt19937_64 rng(202);
  GaussianStream gauss(203);
  int exact_failures = 0, tolerance_failures = 0;
  double worst_scaled = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 2 + uniform_below(rng, 31);
    const std::size_t dim = 8 + uniform_below(rng, 1000);
    const auto batch = random_batch(rng, gauss, n, dim);
    const double base = similarity::cosine_median(views(batch));

    // power-of-two rescaling is exact in binary32, so the result must be too
    auto exact = batch;
    for (auto& v : exact) {
      const float s = std::ldexp(1.0f, static_cast<int>(uniform_below(rng, 40)) - 20);
      for (auto& x : v) x *= s;
    }
    std::shuffle(exact.begin(), exact.end(), rng);
    if (similarity::cosine_median(views(exact)) != base) ++exact_failures;

    // arbitrary factors perturb the stored floats by one rounding each
    auto scaled = batch;
    for (auto& v : scaled) {
      const float s = static_cast<float>(std::exp(8.0 * uniform_unit(rng) - 4.0));
      for (auto& x : v) x *= s;
    }
    std::shuffle(scaled.begin(), scaled.end(), rng);
    const double err = std::fabs(similarity::cosine_median(views(scaled)) - base);
    worst_scaled = std::max(worst_scaled, err);
    if (err > 1e-6) ++tolerance_failures;
  }
  return {exact_failures == 0 && tolerance_failures == 0,
          fmt::format("1000 trials: {} bit-identity failures (2^k scales + permutation), "
                      "{} failures beyond 1e-6 for arbitrary scales (max diff {:.2g})",
                      exact_failures, tolerance_failures, worst_scaled)};
}

curves::TaskMeasurements random_monotone_task(std::mt19937_64& rng) {
  curves::TaskMeasurements m;
  m.task_id = "random";
  std::vector<std::uint64_t> budgets{0};
  const std::size_t extra = 1 + uniform_below(rng, 9);
  for (std::size_t i = 0; i < extra; ++i) budgets.push_back(1 + uniform_below(rng, 5000));
  std::sort(budgets.begin(), budgets.end());
  budgets.erase(std::unique(budgets.begin(), budgets.end()), budgets.end());
  m.budgets = budgets;
  double acc = 0.2 + 0.5 * uniform_unit(rng);
  for (std::size_t i = 0; i < budgets.size(); ++i) {
    m.raw_acc.push_back(acc);
    acc = std::min(1.0, acc + 0.1 * uniform_unit(rng));
  }
  m.zero_shot_acc = m.raw_acc.front();
  m.human_level_acc = std::min(1.0, m.raw_acc.back() + 0.2 * uniform_unit(rng) + 1e-3);
  return m;
}

Outcome auc_oracle() {
  std::mt19937_64 rng(303);
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const auto curve = curves::build_curve(random_monotone_task(rng), 5000);
    worst = std::max(worst, std::fabs(*curve.auc - oracle::fine_grid_area(curve, 1'000'000)));
  }
  const auto fixture = curves::build_curve({"three_point", {0, 50, 5000}, {0.5, 1.0, 1.0}, 0.5, 1.0});
  const double three = *fixture.auc;
  return {worst <= 1e-9 && std::fabs(three - 0.7692) <= 1e-4,
          fmt::format("50 curves max |trapezoid - 1e6 grid| {:.2g} (tol 1e-9); 3-point AUC {:.6f} (0.7692 +- 1e-4)",
                      worst, three)};
}

Outcome area_identity() {
  std::mt19937_64 rng(404);
  double worst_area = 0.0, worst_inverse = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double a = 0.01 + 0.98 * (i + uniform_unit(rng)) / 100.0;
    for (auto kind : {predictor::CurveKind::kPower, predictor::CurveKind::kPiecewiseLinear}) {
      const auto f = predictor::instantiate_curve(kind, a);
      std::vector<double> breaks;
      if (kind == predictor::CurveKind::kPiecewiseLinear) breaks.push_back(a >= 0.5 ? 2 * (1 - a) : 1 - 2 * a);
      const double area = oracle::integrate([&](double x) { return f(x); }, breaks);
      worst_area = std::max(worst_area, std::fabs(area - a));
    }
    const auto power = predictor::instantiate_curve(predictor::CurveKind::kPower, a);
    for (double y : {0.5, 0.8, 0.9, 0.95, 0.99, 1.0})
      worst_inverse = std::max(worst_inverse, std::fabs(power(power.inverse(y)) - y));
  }
  return {worst_area <= 1e-6 && worst_inverse <= 1e-9,
          fmt::format("max |area - AUC'| {:.2g} (tol 1e-6), max |f(x_req) - y| {:.2g} (tol 1e-9)", worst_area,
                      worst_inverse)};
}

Outcome budget_arithmetic() {
  const auto p = predictor::required_budget(0.5, 0.9, 5000);
  // extended-precision evaluation of e^(x ln(N+1)) - 1 with x = 0.9^(A/(1-A)) = 0.9
  const long double n_exact = std::expm1(0.9L * std::log(5001.0L));
  const auto n_oracle = static_cast<std::uint64_t>(std::ceil(n_exact));
  const bool ok = (p.n_required + 1 >= n_oracle && p.n_required <= n_oracle + 1) &&
                  std::llabs(static_cast<long long>(p.n_required) - 2133) <= 1 && p.n_snapped == 2500;
  return {ok, fmt::format("n_required {} (oracle {:.6f} -> {}), n_snapped {}", p.n_required,
                          static_cast<double>(n_exact), n_oracle, p.n_snapped)};
}

Outcome base_max_anchor() {
  std::vector<double> aucs;
  for (const auto& t : fixtures::reference_tasks()) aucs.push_back(t.auc);
  const double value = predictor::base_max_error(aucs);
  return {aucs.size() == 30 && std::fabs(value - 0.424) <= 0.001,
          fmt::format("{:.4f} over {} tasks (0.424 +- 0.001); published overall error 0.391 differs because "
                      "its zero-improvement baseline convention is not recoverable from the table",
                      value, aucs.size())};
}

Outcome regression_recovery() {
  std::vector<double> ds;
  for (const auto& t : fixtures::reference_tasks()) ds.push_back((t.auc - 0.310) / 0.545);
  double worst_c = 0.0, worst_i = 0.0;
  int bad_folds = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    GaussianStream noise(derive_seed(5050, seed));
    std::vector<predictor::TaskPoint> tasks;
    for (std::size_t k = 0; k < ds.size(); ++k)
      tasks.push_back({"task" + std::to_string(k), ds[k], 0.545 * ds[k] + 0.310 + 0.02 * noise.next()});
    const auto report = predictor::hold_one_out(tasks);
    for (const auto& fold : report.folds) {
      if (!fold.c) {
        ++bad_folds;
        continue;
      }
      const double dc = std::fabs(*fold.c - 0.545), di = std::fabs(*fold.intercept - 0.310);
      worst_c = std::max(worst_c, dc);
      worst_i = std::max(worst_i, di);
      if (dc > 0.05 || di > 0.02) ++bad_folds;
    }
  }
  return {bad_folds == 0, fmt::format("20 seeds x 30 folds: max |c - 0.545| {:.4f} (tol 0.05), "
                                      "max |I - 0.310| {:.4f} (tol 0.02), failing folds {}",
                                      worst_c, worst_i, bad_folds)};
}

Outcome planted_geometry() {
  std::vector<double> cos_low;
  for (auto g : {fixtures::Geometry::kParallel, fixtures::Geometry::kOrthogonal, fixtures::Geometry::kOpposed}) {
    const auto task = fixtures::planted_task(g, 11);
    cos_low.push_back(similarity::task_metric("planted", task.dump, task.scores, similarity::MetricSpec{}).value);
  }
  // regressor fitted on the reference tasks with d derived from their AUCs
  std::vector<predictor::TaskPoint> table;
  for (const auto& t : fixtures::reference_tasks()) table.push_back({t.task_id, (t.auc - 0.310) / 0.545, t.auc});
  const auto model = predictor::fit(table);
  std::vector<double> predicted;
  for (double d : cos_low) predicted.push_back(predictor::predict_auc(model, d));
  const std::vector<double> expected_order{3, 2, 1};
  const auto rho = stats::spearman(predicted, expected_order);
  const bool ok = std::fabs(cos_low[0] - 1.0) <= 0.05 && std::fabs(cos_low[1]) <= 0.05 && cos_low[2] < 0.0 &&
                  rho && *rho == 1.0;
  return {ok, fmt::format("cos_low parallel {:.4f}, orthogonal {:.4f}, opposed {:.4f}; predicted AUC "
                          "{:.3f} > {:.3f} > {:.3f}, Spearman {}",
                          cos_low[0], cos_low[1], cos_low[2], predicted[0], predicted[1], predicted[2],
                          rho ? fmt::format("{:.3f}", *rho) : "undefined")};
}

Outcome projection_fidelity() {
  constexpr std::size_t kDim = 64;
  int within = 0;
  double worst = 0.0;
  for (std::uint64_t trial = 0; trial < 1000; ++trial) {
    std::mt19937_64 rng(derive_seed(606, trial));
    GaussianStream gauss(derive_seed(607, trial));
    // correlated pair with cosine spread over roughly (-1, 1)
    const double rho = 2.0 * uniform_unit(rng) - 1.0;
    auto u = fixtures::gaussian_vector(gauss, kDim);
    auto w = fixtures::gaussian_vector(gauss, kDim);
    std::vector<float> v(kDim);
    for (std::size_t k = 0; k < kDim; ++k)
      v[k] = static_cast<float>(rho * u[k] + std::sqrt(1 - rho * rho) * w[k]);
    for (auto* vec : {&u, &v}) {
      const double norm = similarity::grad_norm(*vec);
      for (auto& x : *vec) x = static_cast<float>(x / norm);
    }
    const double full = similarity::pairwise_cosine(u, v);
    grdx::GradDump dump{{{"layer", kDim}}, {{0, u}, {1, v}}};
    const auto projected = similarity::project_gradients(dump, {std::nullopt, {4096}, trial});
    const double approx = similarity::pairwise_cosine(projected.records[0].values, projected.records[1].values);
    const double err = std::fabs(approx - full);
    worst = std::max(worst, err);
    if (err <= 0.05) ++within;
  }
  return {within >= 950, fmt::format("{} / 1000 trials within 0.05 at k=4096 (need >= 950), max err {:.4f}",
                                     within, worst)};
}

Outcome cost_model() {
  const cost::CostParams params{};
  // Hand enumeration on the default ladder {50, 100, 200, 500, 1000, 2500, 5000}:
  //   required  predicted  incremental  maximum     predicted_first
  //      500       200      3 runs       4500 ann.   1 run
  //      100       100      1 run        4900 ann.   -
  //     2500      5000      5 runs       2500 ann.   2500 ann.
  //       50       200      0            4950 ann.   150 ann.
  const std::vector<cost::TaskRequirement> suite{{500, 200}, {100, 100}, {2500, 5000}, {50, 200}};
  const std::vector<std::pair<double, double>> hand{{0.0, 9.0 / 4}, {16850.0 / 4, 0.0}, {2650.0 / 4, 1.0 / 4}};
  const auto means = cost::compare_strategies(suite, params);
  bool exact = means.size() == 3;
  for (std::size_t s = 0; exact && s < 3; ++s)
    exact = means[s].extra_annotation == hand[s].first && means[s].extra_training_runs == hand[s].second;

  std::mt19937_64 rng(707);
  int violations = 0;
  for (int i = 0; i < 10000; ++i) {
    cost::CostParams p;
    if (i % 2) {
      // random strictly ascending ladder
      p.ladder.clear();
      std::uint64_t v = 0;
      const std::size_t len = 1 + uniform_below(rng, 10);
      for (std::size_t k = 0; k < len; ++k) p.ladder.push_back(v += 1 + uniform_below(rng, 1000));
    }
    const auto required = p.ladder[uniform_below(rng, p.ladder.size())];
    const auto predicted = p.ladder[uniform_below(rng, p.ladder.size())];
    const auto inc = cost::simulate(cost::Strategy::kIncremental, required, predicted, p);
    const auto max = cost::simulate(cost::Strategy::kMaximum, required, predicted, p);
    const auto ours = cost::simulate(cost::Strategy::kPredictedFirst, required, predicted, p);
    const auto perfect = cost::simulate(cost::Strategy::kPredictedFirst, required, required, p);
    if (ours.extra_annotation > max.extra_annotation || ours.extra_training_runs > inc.extra_training_runs ||
        inc.extra_annotation != 0.0 || max.extra_training_runs != 0.0 || perfect.extra_annotation != 0.0 ||
        perfect.extra_training_runs != 0.0)
      ++violations;
  }
  return {exact && violations == 0,
          fmt::format("4-task suite {}; dominance violations {} / 10000", exact ? "exact" : "MISMATCH", violations)};
}

Outcome grdx_round_trip() {
  std::mt19937_64 rng(808);
  GaussianStream gauss(809);
  int mismatches = 0, empty_dumps = 0;
  for (int trial = 0; trial < 300; ++trial) {
    grdx::GradDump dump;
    const std::size_t layers = 1 + uniform_below(rng, 5);
    for (std::size_t l = 0; l < layers; ++l)
      dump.manifest.push_back({"model.layers." + std::to_string(l) + ".lora", 1 + uniform_below(rng, 300)});
    // every fifth dump has no records
    const std::size_t n = trial % 5 == 0 ? 0 : 1 + uniform_below(rng, 12);
    if (n == 0) ++empty_dumps;
    for (std::size_t i = 0; i < n; ++i)
      dump.records.push_back({rng(), fixtures::gaussian_vector(gauss, grdx::total_dim(dump.manifest))});

    std::ostringstream first(std::ios::binary);
    grdx::write_dump(dump, first);
    std::istringstream in(first.str(), std::ios::binary);
    const auto back = grdx::read_dump(in);
    std::ostringstream second(std::ios::binary);
    grdx::write_dump(back, second);
    const std::uint64_t expected_size =
        grdx::header_bytes(dump.manifest) + n * (8 + 4 * grdx::total_dim(dump.manifest));
    if (!(back == dump) || first.str() != second.str() || first.str().size() != expected_size) ++mismatches;
  }
  return {mismatches == 0,
          fmt::format("300 random dumps ({} empty): {} byte or value mismatches", empty_dumps, mismatches)};
}

}  // namespace

int main() {
  const auto start = std::chrono::steady_clock::now();
  criterion("cosine_oracle", cosine_oracle);
  criterion("scale_permutation", scale_permutation);
  criterion("auc_oracle", auc_oracle);
  criterion("curve_area_identity", area_identity);
  criterion("budget_arithmetic", budget_arithmetic);
  criterion("base_max_anchor", base_max_anchor);
  criterion("regression_recovery", regression_recovery);
  criterion("planted_geometry", planted_geometry);
  criterion("projection_fidelity", projection_fidelity);
  criterion("cost_model", cost_model);
  criterion("grdx_round_trip", grdx_round_trip);
  std::printf("%d criteria failed, %.1fs total\n", failures, seconds_since(start));
  return failures == 0 ? 0 : 1;
}
