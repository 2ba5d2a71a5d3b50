#include "effpred/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "effpred/error.hpp"
#include "effpred/parallel.hpp"
#include "effpred/simd/kernels.hpp"
#include "effpred/stats.hpp"

namespace effpred::similarity {
namespace {

double cosine_from_parts(double dot, double norm_a, double norm_b) {
  return std::clamp(dot / (norm_a * norm_b), -1.0, 1.0);
}

std::vector<VectorView> views_of(std::span<const grdx::GradientRecord> records) {
  std::vector<VectorView> views;
  views.reserve(records.size());
  for (const auto& r : records) views.emplace_back(r.values);
  return views;
}

}  // namespace

std::string_view to_string(Metric metric) noexcept {
  switch (metric) {
    case Metric::kGradNorm: return "grad_norm";
    case Metric::kConfAvg: return "conf_avg";
    case Metric::kCosSim: return "cos_sim";
    case Metric::kCosLow: return "cos_low";
  }
  return "unknown";
}

Metric parse_metric(std::string_view name) {
  if (name == "grad_norm") return Metric::kGradNorm;
  if (name == "conf_avg") return Metric::kConfAvg;
  if (name == "cos_sim") return Metric::kCosSim;
  if (name == "cos_low") return Metric::kCosLow;
  fail(ErrorCode::kValidation, "unknown metric '" + std::string(name) + "'");
}

double grad_norm(VectorView values) {
  return std::sqrt(simd::active().sum_squares(values.data(), values.size()));
}

double pairwise_cosine(VectorView a, VectorView b) {
  if (a.size() != b.size())
    fail(ErrorCode::kValidation, "cosine of vectors with different lengths");
  const auto& k = simd::active();
  const double na = std::sqrt(k.sum_squares(a.data(), a.size()));
  const double nb = std::sqrt(k.sum_squares(b.data(), b.size()));
  if (na == 0.0 || nb == 0.0) fail(ErrorCode::kDegenerateInput, "cosine of a zero vector");
  return cosine_from_parts(k.dot(a.data(), b.data(), a.size()), na, nb);
}

std::vector<double> pairwise_cosines(std::span<const VectorView> batch) {
  const std::size_t n = batch.size();
  if (n < 2) fail(ErrorCode::kValidation, "pairwise cosines need at least 2 vectors");
  const std::size_t dim = batch.front().size();
  for (std::size_t i = 0; i < n; ++i)
    if (batch[i].size() != dim)
      fail(ErrorCode::kValidation, "batch vectors differ in length", "batch_index=" + std::to_string(i));

  const auto& k = simd::active();
  std::vector<double> norms(n);
  parallel_for(n, [&](std::size_t i) {
    norms[i] = std::sqrt(k.sum_squares(batch[i].data(), dim));
  });
  for (std::size_t i = 0; i < n; ++i)
    if (norms[i] == 0.0)
      fail(ErrorCode::kDegenerateInput, "zero gradient vector in batch", "batch_index=" + std::to_string(i));

  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
  pairs.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      pairs.emplace_back(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j));

  std::vector<double> cosines(pairs.size());
  parallel_for(pairs.size(), [&](std::size_t p) {
    const auto [i, j] = pairs[p];
    cosines[p] = cosine_from_parts(k.dot(batch[i].data(), batch[j].data(), dim), norms[i], norms[j]);
  });
  return cosines;
}

double cosine_median(std::span<const VectorView> batch) {
  const auto cosines = pairwise_cosines(batch);
  return stats::median(cosines);
}

double cosine_median(std::span<const grdx::GradientRecord> batch) {
  const auto views = views_of(batch);
  return cosine_median(std::span<const VectorView>(views));
}

// ---------------------------------------------------------------------------

double default_t(Metric metric) noexcept { return metric == Metric::kCosLow ? 0.1 : 1.0; }

double resolved_t(const MetricSpec& spec) noexcept { return spec.t.value_or(default_t(spec.metric)); }

confidence::SegmentSelection select_sample(std::span<const confidence::ConfidenceScore> scores,
                                           std::span<const std::uint64_t> available_ids,
                                           const MetricSpec& spec) {
  const double t = resolved_t(spec);
  if (spec.sample_size == 0) fail(ErrorCode::kValidation, "sample_size must be positive");
  if (!scores.empty()) return confidence::select_low_confidence(scores, t, spec.sample_size, spec.seed);

  if (spec.metric == Metric::kConfAvg)
    fail(ErrorCode::kValidation, "conf_avg needs confidence scores");
  if (t != 1.0)
    fail(ErrorCode::kValidation, "a low-confidence segment (t < 1) needs confidence scores");
  std::vector<std::uint64_t> ids(available_ids.begin(), available_ids.end());
  std::sort(ids.begin(), ids.end());
  if (std::adjacent_find(ids.begin(), ids.end()) != ids.end())
    fail(ErrorCode::kValidation, "duplicate example ids");
  confidence::SegmentSelection selection;
  selection.t = 1.0;
  selection.seed = spec.seed;
  selection.segment_size = ids.size();
  selection.sampled_ids = confidence::sample_without_replacement(std::move(ids), spec.sample_size, spec.seed);
  return selection;
}

MetricValue evaluate_metric(std::string task_id, const MetricSpec& spec,
                            const confidence::SegmentSelection& selection,
                            const grdx::GradDump& dump,
                            std::span<const confidence::ConfidenceScore> scores) {
  MetricValue out;
  out.task_id = std::move(task_id);
  out.metric = spec.metric;
  out.sample_size = selection.sampled_ids.size();
  out.t = selection.t;
  out.seed = selection.seed;

  if (spec.metric == Metric::kConfAvg) {
    std::unordered_map<std::uint64_t, const confidence::ConfidenceScore*> by_id;
    for (const auto& s : scores) by_id.emplace(s.example_id, &s);
    std::vector<double> values;
    for (const auto id : selection.sampled_ids) {
      auto it = by_id.find(id);
      if (it == by_id.end())
        fail(ErrorCode::kConsistency, "no confidence score for sampled example", "example_id=" + std::to_string(id));
      if (it->second->method != confidence::Method::kAvgProb)
        fail(ErrorCode::kValidation, "conf_avg needs avg_prob scores");
      values.push_back(it->second->value);
    }
    out.value = stats::median(values);
    return out;
  }

  std::unordered_map<std::uint64_t, std::size_t> index;
  for (std::size_t i = 0; i < dump.records.size(); ++i) index.emplace(dump.records[i].example_id, i);
  std::vector<VectorView> batch;
  batch.reserve(selection.sampled_ids.size());
  for (const auto id : selection.sampled_ids) {
    auto it = index.find(id);
    if (it == index.end())
      fail(ErrorCode::kConsistency, "no gradient for sampled example", "example_id=" + std::to_string(id));
    batch.emplace_back(dump.records[it->second].values);
  }

  if (spec.metric == Metric::kGradNorm) {
    std::vector<double> norms(batch.size());
    parallel_for(batch.size(), [&](std::size_t i) { norms[i] = grad_norm(batch[i]); });
    out.value = stats::median(norms);
  } else {
    out.value = cosine_median(std::span<const VectorView>(batch));
  }
  return out;
}

MetricValue task_metric(std::string task_id, const grdx::GradDump& dump,
                        std::span<const confidence::ConfidenceScore> scores, const MetricSpec& spec) {
  std::vector<std::uint64_t> ids;
  ids.reserve(dump.records.size());
  for (const auto& r : dump.records) ids.push_back(r.example_id);
  const auto selection = select_sample(scores, ids, spec);
  return evaluate_metric(std::move(task_id), spec, selection, dump, scores);
}

}  // namespace effpred::similarity
