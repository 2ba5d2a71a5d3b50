#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "effpred/confidence.hpp"
#include "effpred/grad_store.hpp"

namespace effpred::similarity {

enum class Metric { kGradNorm, kConfAvg, kCosSim, kCosLow };

std::string_view to_string(Metric metric) noexcept;
/// Accepts grad_norm, conf_avg, cos_sim, cos_low.
Metric parse_metric(std::string_view name);

/// Task-level aggregate of a per-example or pairwise statistic.
struct MetricValue {
  std::string task_id;
  Metric metric = Metric::kCosLow;
  double value = 0.0;
  std::size_t sample_size = 0;
  double t = 1.0;
  std::uint64_t seed = 0;
};

using VectorView = std::span<const float>;

/// Euclidean norm, accumulated in double.
double grad_norm(VectorView values);

/// Cosine of the angle between two equal-length non-zero vectors, clamped
/// to [-1, 1]. Zero vectors are a degenerate-input error.
double pairwise_cosine(VectorView a, VectorView b);

/// All C(n, 2) cosines in (0,1), (0,2), ..., (1,2), ... order. Norms are
/// computed once per vector; pairs are evaluated in parallel.
std::vector<double> pairwise_cosines(std::span<const VectorView> batch);

/// Median over all unordered pairwise cosines of the batch (n >= 2).
double cosine_median(std::span<const VectorView> batch);
double cosine_median(std::span<const grdx::GradientRecord> batch);

// ---------------------------------------------------------------------------
// Gaussian random projection, applied layer by layer.

struct ProjectionConfig {
  /// Per-layer target dim is max(1, ceil(dim / reduction_ratio)).
  std::optional<double> reduction_ratio;
  /// Explicit per-layer target dims; takes precedence over the ratio.
  std::vector<std::uint64_t> target_dims;
  std::uint64_t seed = 0;
};

/// Output manifest: same layer names, projected dims.
grdx::Manifest projected_manifest(const grdx::Manifest& manifest, const ProjectionConfig& config);

/// Multiplies every layer slice by a k x dim matrix of i.i.d. N(0, 1/k)
/// entries and concatenates the results. Layer l draws its matrix row by
/// row from GaussianStream(derive_seed(config.seed, l)), so the projection
/// depends only on (seed, layer index, dims).
grdx::GradDump project_gradients(const grdx::GradDump& dump, const ProjectionConfig& config);

// ---------------------------------------------------------------------------
// Task metrics.

struct MetricSpec {
  Metric metric = Metric::kCosLow;
  /// Low-confidence fraction; defaults to 0.1 for cos_low and 1.0 otherwise.
  std::optional<double> t;
  std::size_t sample_size = 32;
  std::uint64_t seed = 0;
};

double default_t(Metric metric) noexcept;
double resolved_t(const MetricSpec& spec) noexcept;

/// Draws the metric batch. With confidence scores the batch comes from the
/// lowest-confidence fraction t; without scores (only allowed when t = 1)
/// it is drawn from `available_ids` sorted ascending.
confidence::SegmentSelection select_sample(std::span<const confidence::ConfidenceScore> scores,
                                           std::span<const std::uint64_t> available_ids,
                                           const MetricSpec& spec);

/// Computes the metric over an already drawn batch. Gradient metrics look
/// the sampled ids up in `dump` (consistency error when absent); conf_avg
/// reads avg_prob scores.
MetricValue evaluate_metric(std::string task_id, const MetricSpec& spec,
                            const confidence::SegmentSelection& selection,
                            const grdx::GradDump& dump,
                            std::span<const confidence::ConfidenceScore> scores);

/// select_sample followed by evaluate_metric.
MetricValue task_metric(std::string task_id, const grdx::GradDump& dump,
                        std::span<const confidence::ConfidenceScore> scores, const MetricSpec& spec);

}  // namespace effpred::similarity
