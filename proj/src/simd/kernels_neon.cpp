// Built on aarch64 only, where NEON (AdvSIMD) is part of the baseline ISA.
#include <arm_neon.h>

#include <cmath>

#include "effpred/simd/kernels.hpp"

namespace effpred::simd::detail {
namespace {

double dot_neon(const float* a, const float* b, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0), acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const float32x4_t va = vld1q_f32(a + i);
    const float32x4_t vb = vld1q_f32(b + i);
    acc0 = vfmaq_f64(acc0, vcvt_f64_f32(vget_low_f32(va)), vcvt_f64_f32(vget_low_f32(vb)));
    acc1 = vfmaq_f64(acc1, vcvt_high_f64_f32(va), vcvt_high_f64_f32(vb));
  }
  double acc = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) acc += static_cast<double>(a[i]) * static_cast<double>(b[i]);
  return acc;
}

double sum_squares_neon(const float* a, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0), acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const float32x4_t v = vld1q_f32(a + i);
    const float64x2_t lo = vcvt_f64_f32(vget_low_f32(v));
    const float64x2_t hi = vcvt_high_f64_f32(v);
    acc0 = vfmaq_f64(acc0, lo, lo);
    acc1 = vfmaq_f64(acc1, hi, hi);
  }
  double acc = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) {
    const double v = a[i];
    acc += v * v;
  }
  return acc;
}

double mixed_dot_neon(const double* a, const float* b, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0), acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const float32x4_t vb = vld1q_f32(b + i);
    acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vcvt_f64_f32(vget_low_f32(vb)));
    acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vcvt_high_f64_f32(vb));
  }
  double acc = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) acc += a[i] * static_cast<double>(b[i]);
  return acc;
}

bool all_finite_neon(const float* a, std::size_t n) {
  const uint32x4_t exp_mask = vdupq_n_u32(0x7F800000u);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const uint32x4_t e = vandq_u32(vreinterpretq_u32_f32(vld1q_f32(a + i)), exp_mask);
    if (vmaxvq_u32(vceqq_u32(e, exp_mask)) != 0) return false;
  }
  for (; i < n; ++i)
    if (!std::isfinite(a[i])) return false;
  return true;
}

}  // namespace

const KernelTable& neon_table() noexcept {
  static const KernelTable table{Isa::kNeon, "neon", dot_neon, sum_squares_neon, mixed_dot_neon,
                                 all_finite_neon};
  return table;
}

}  // namespace effpred::simd::detail
