#include <cmath>

#include "effpred/simd/kernels.hpp"

namespace effpred::simd {
namespace {

double dot_scalar(const float* a, const float* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += static_cast<double>(a[i]) * static_cast<double>(b[i]);
  return acc;
}

double sum_squares_scalar(const float* a, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double v = a[i];
    acc += v * v;
  }
  return acc;
}

double mixed_dot_scalar(const double* a, const float* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * static_cast<double>(b[i]);
  return acc;
}

bool all_finite_scalar(const float* a, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i)
    if (!std::isfinite(a[i])) return false;
  return true;
}

}  // namespace

const KernelTable& scalar_kernels() noexcept {
  static const KernelTable table{Isa::kScalar, "scalar", dot_scalar, sum_squares_scalar,
                                 mixed_dot_scalar, all_finite_scalar};
  return table;
}

}  // namespace effpred::simd
