#pragma once

#include <cstddef>
#include <string_view>

namespace effpred::simd {

// Reduction kernels over binary32 storage. Every kernel accumulates in
// binary64 regardless of the instruction set.

using DotFn = double (*)(const float* a, const float* b, std::size_t n);
using SumSquaresFn = double (*)(const float* a, std::size_t n);
using MixedDotFn = double (*)(const double* a, const float* b, std::size_t n);
using AllFiniteFn = bool (*)(const float* a, std::size_t n);

enum class Isa { kScalar, kAvx2, kNeon };

struct KernelTable {
  Isa isa;
  std::string_view name;
  DotFn dot;
  SumSquaresFn sum_squares;
  MixedDotFn mixed_dot;
  AllFiniteFn all_finite;
};

const KernelTable& scalar_kernels() noexcept;

/// nullptr when the variant was not compiled in or the CPU lacks it.
const KernelTable* avx2_kernels() noexcept;
const KernelTable* neon_kernels() noexcept;

/// Kernel set used by the library. Picks the widest supported variant on
/// first use; EFFPRED_SIMD=scalar|avx2|neon overrides the choice.
const KernelTable& active() noexcept;

/// Overrides the active table (tests and benchmarks). Not thread-safe with
/// concurrent kernel calls.
void set_active(const KernelTable& table) noexcept;

}  // namespace effpred::simd
