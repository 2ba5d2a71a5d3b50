#include <atomic>
#include <cstdlib>
#include <string_view>

#include "effpred/simd/kernels.hpp"

namespace effpred::simd {

namespace detail {
#if defined(EFFPRED_HAVE_AVX2)
const KernelTable& avx2_table() noexcept;
#endif
#if defined(EFFPRED_HAVE_NEON)
const KernelTable& neon_table() noexcept;
#endif
}  // namespace detail

const KernelTable* avx2_kernels() noexcept {
#if defined(EFFPRED_HAVE_AVX2)
  static const bool supported = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return supported ? &detail::avx2_table() : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable* neon_kernels() noexcept {
#if defined(EFFPRED_HAVE_NEON)
  return &detail::neon_table();
#else
  return nullptr;
#endif
}

namespace {

const KernelTable* pick_default() noexcept {
  const char* env = std::getenv("EFFPRED_SIMD");
  const std::string_view want = env != nullptr ? env : "";
  if (want == "scalar") return &scalar_kernels();
  if (want == "avx2" && avx2_kernels() != nullptr) return avx2_kernels();
  if (want == "neon" && neon_kernels() != nullptr) return neon_kernels();
  if (const auto* t = avx2_kernels()) return t;
  if (const auto* t = neon_kernels()) return t;
  return &scalar_kernels();
}

std::atomic<const KernelTable*>& slot() noexcept {
  static std::atomic<const KernelTable*> current{pick_default()};
  return current;
}

}  // namespace

const KernelTable& active() noexcept { return *slot().load(std::memory_order_acquire); }

void set_active(const KernelTable& table) noexcept {
  slot().store(&table, std::memory_order_release);
}

}  // namespace effpred::simd
