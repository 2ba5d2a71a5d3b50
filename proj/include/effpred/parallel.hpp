#pragma once

#include <cstddef>
#include <functional>

namespace effpred {

/// Cap on worker threads; 0 means hardware concurrency. Initialised from
/// EFFPRED_THREADS on first use.
std::size_t thread_limit() noexcept;
void set_thread_limit(std::size_t threads) noexcept;

/// Runs body(i) for every i in [0, n) over contiguous blocks. Each index is
/// visited exactly once; callers write results to slot i so that the output
/// does not depend on scheduling. Rethrows the first worker exception.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace effpred
