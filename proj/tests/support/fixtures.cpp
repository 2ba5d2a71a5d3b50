#include "fixtures.hpp"

#include <atomic>
#include <cmath>
#include <fstream>
#include <random>
#include <stdexcept>

#include "effpred/io.hpp"

namespace fixtures {

std::filesystem::path path(const std::string& name) { return std::filesystem::path(EFFPRED_FIXTURE_DIR) / name; }

std::vector<ReferenceTask> reference_tasks() {
  std::ifstream in(path("reference_tasks.csv"));
  if (!in) throw std::runtime_error("missing reference_tasks.csv fixture");
  const auto table = effpred::io::read_csv(in);
  std::vector<ReferenceTask> tasks;
  for (const auto& row : table.rows) {
    tasks.push_back({row[table.column("task_id")],
                     effpred::io::parse_double(row[table.column("zero_shot_acc")], "fixture"),
                     effpred::io::parse_double(row[table.column("max_finetuned_acc")], "fixture"),
                     effpred::io::parse_double(row[table.column("max_attainable_acc")], "fixture"),
                     effpred::io::parse_double(row[table.column("auc")], "fixture")});
  }
  return tasks;
}

std::vector<float> gaussian_vector(effpred::GaussianStream& gauss, std::size_t dim) {
  std::vector<float> v(dim);
  for (auto& x : v) x = static_cast<float>(gauss.next());
  return v;
}

PlantedTask planted_task(Geometry geometry, std::uint64_t seed) {
  constexpr std::size_t kExamples = 320;
  constexpr std::size_t kLow = 32;
  constexpr std::size_t kDim = 4096;

  std::mt19937_64 rng(seed);
  effpred::GaussianStream gauss(effpred::derive_seed(seed, 1));
  auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * effpred::uniform_unit(rng); };

  const auto shared = gaussian_vector(gauss, kDim);     // direction of confident examples
  const auto low_axis = gaussian_vector(gauss, kDim);   // direction for the parallel geometry

  PlantedTask task;
  task.dump.manifest = {{"lora_A", kDim / 2}, {"lora_B", kDim / 2}};
  for (std::size_t i = 0; i < kExamples; ++i) {
    const std::uint64_t id = 1000 + i;
    const bool low = i % 10 == 3;  // 32 of 320, interleaved with confident ones
    effpred::grdx::GradientRecord record{id, std::vector<float>(kDim)};
    if (!low) {
      const double scale = uniform(0.5, 2.0);
      const auto noise = gaussian_vector(gauss, kDim);
      for (std::size_t k = 0; k < kDim; ++k)
        record.values[k] = static_cast<float>(scale * (shared[k] + 0.2 * noise[k]));
      task.scores.push_back({id, effpred::confidence::Method::kAvgProb, uniform(0.6, 0.99)});
    } else {
      const std::size_t slot = i / 10;
      switch (geometry) {
        case Geometry::kParallel: {
          const double scale = uniform(0.1, 3.0);
          for (std::size_t k = 0; k < kDim; ++k) record.values[k] = static_cast<float>(scale * low_axis[k]);
          break;
        }
        case Geometry::kOrthogonal:
          record.values = gaussian_vector(gauss, kDim);
          break;
        case Geometry::kOpposed:
          for (std::size_t k = 0; k < kLow; ++k)
            record.values[k] = static_cast<float>((k == slot ? 1.0 : 0.0) - 1.0 / kLow);
          break;
      }
      task.scores.push_back({id, effpred::confidence::Method::kAvgProb, uniform(0.05, 0.3)});
    }
    task.dump.records.push_back(std::move(record));
  }
  return task;
}

TempDir::TempDir() {
  static std::atomic<int> counter{0};
  std::random_device rd;
  path_ = std::filesystem::temp_directory_path() /
          ("effpred-test-" + std::to_string(rd()) + "-" + std::to_string(counter++));
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

}  // namespace fixtures
