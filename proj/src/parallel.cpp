#include "effpred/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace effpred {
namespace {

std::size_t from_env() noexcept {
  const char* env = std::getenv("EFFPRED_THREADS");
  if (env == nullptr) return 0;
  char* end = nullptr;
  const long long v = std::strtoll(env, &end, 10);
  if (end == env || v < 0) return 0;
  return static_cast<std::size_t>(v);
}

std::atomic<std::size_t>& limit_slot() noexcept {
  static std::atomic<std::size_t> limit{from_env()};
  return limit;
}

}  // namespace

std::size_t thread_limit() noexcept { return limit_slot().load(); }

void set_thread_limit(std::size_t threads) noexcept { limit_slot().store(threads); }

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
  if (n == 0) return;
  std::size_t workers = thread_limit();
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, n);
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }

  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  const std::size_t block = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = w * block;
    const std::size_t end = std::min(n, begin + block);
    if (begin >= end) break;
    pool.emplace_back([&, begin, end] {
      try {
        for (std::size_t i = begin; i < end; ++i) body(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  pool.clear();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace effpred
