#include <cmath>

#include "effpred/error.hpp"
#include "effpred/rng.hpp"
#include "effpred/similarity.hpp"
#include "effpred/simd/kernels.hpp"

namespace effpred::similarity {

grdx::Manifest projected_manifest(const grdx::Manifest& manifest, const ProjectionConfig& config) {
  grdx::validate_manifest(manifest);
  grdx::Manifest out = manifest;
  if (!config.target_dims.empty()) {
    if (config.target_dims.size() != manifest.size())
      fail(ErrorCode::kValidation, "target_dims must list one dim per layer");
    for (std::size_t l = 0; l < out.size(); ++l) {
      if (config.target_dims[l] == 0) fail(ErrorCode::kValidation, "target dim must be positive");
      out[l].dim = config.target_dims[l];
    }
    return out;
  }
  if (!config.reduction_ratio) fail(ErrorCode::kValidation, "projection needs a ratio or target dims");
  const double ratio = *config.reduction_ratio;
  if (!(ratio >= 1.0) || !std::isfinite(ratio))
    fail(ErrorCode::kValidation, "reduction_ratio must be a finite value >= 1");
  for (auto& layer : out) {
    const double k = std::ceil(static_cast<double>(layer.dim) / ratio);
    layer.dim = std::max<std::uint64_t>(1, static_cast<std::uint64_t>(k));
  }
  return out;
}

grdx::GradDump project_gradients(const grdx::GradDump& dump, const ProjectionConfig& config) {
  grdx::GradDump out;
  out.manifest = projected_manifest(dump.manifest, config);
  const std::uint64_t in_total = grdx::total_dim(dump.manifest);
  const std::uint64_t out_total = grdx::total_dim(out.manifest);
  for (const auto& r : dump.records)
    if (r.values.size() != in_total)
      fail(ErrorCode::kFormat, "record length does not match manifest",
           "example_id=" + std::to_string(r.example_id));

  out.records.resize(dump.records.size());
  for (std::size_t i = 0; i < dump.records.size(); ++i) {
    out.records[i].example_id = dump.records[i].example_id;
    out.records[i].values.resize(out_total);
  }

  const auto& kernels = simd::active();
  std::vector<double> row;
  std::uint64_t in_offset = 0, out_offset = 0;
  for (std::size_t l = 0; l < dump.manifest.size(); ++l) {
    const std::uint64_t d = dump.manifest[l].dim;
    const std::uint64_t k = out.manifest[l].dim;
    const double scale = 1.0 / std::sqrt(static_cast<double>(k));
    GaussianStream gauss(derive_seed(config.seed, l));
    row.resize(d);
    for (std::uint64_t r = 0; r < k; ++r) {
      for (auto& v : row) v = gauss.next() * scale;
      for (std::size_t i = 0; i < dump.records.size(); ++i) {
        const float* slice = dump.records[i].values.data() + in_offset;
        const double y = kernels.mixed_dot(row.data(), slice, d);
        const auto projected = static_cast<float>(y);
        if (!std::isfinite(projected))
          fail(ErrorCode::kNumeric, "non-finite projected value",
               "example_id=" + std::to_string(dump.records[i].example_id));
        out.records[i].values[out_offset + r] = projected;
      }
    }
    in_offset += d;
    out_offset += k;
  }
  return out;
}

}  // namespace effpred::similarity
