#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "effpred/confidence.hpp"
#include "effpred/grad_store.hpp"
#include "effpred/rng.hpp"

namespace fixtures {

std::filesystem::path path(const std::string& name);

/// Per-task accuracies and AUC from the 30-task reference table.
struct ReferenceTask {
  std::string task_id;
  double zero_shot_acc;
  double max_finetuned_acc;
  double max_attainable_acc;
  double auc;
};
std::vector<ReferenceTask> reference_tasks();

std::vector<float> gaussian_vector(effpred::GaussianStream& gauss, std::size_t dim);

/// Geometry of the low-confidence gradients in a planted task.
enum class Geometry { kParallel, kOrthogonal, kOpposed };

/// 320 examples, of which the 32 lowest-confidence ones (avg_prob in
/// [0.05, 0.3]) carry gradients with the requested geometry; the others are
/// confident (avg_prob in [0.6, 0.99]) and share a common direction. With
/// t = 0.1 and sample_size = 32 the cos_low batch is the whole low segment.
///   parallel:   positive multiples of one vector, cosine 1
///   orthogonal: i.i.d. Gaussian vectors in 4096 dims, cosine near 0
///   opposed:    regular simplex (e_i - centroid), cosine -1/31
struct PlantedTask {
  effpred::grdx::GradDump dump;
  std::vector<effpred::confidence::ConfidenceScore> scores;
};
PlantedTask planted_task(Geometry geometry, std::uint64_t seed);

/// Scratch directory removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const noexcept { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace fixtures
