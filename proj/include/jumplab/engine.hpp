#pragma once

#include <atomic>
#include <cstdint>
#include <exception>
#include <utility>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace jumplab {

// Runs fn(path_index) for every index in [0, n_paths). workers <= 1 runs the
// plain serial loop; otherwise OpenMP distributes indices. fn must write only
// per-index state (slot pattern) so results do not depend on scheduling.
// The first exception thrown by any fn is rethrown after the loop.
template <typename Fn>
void for_each_path(std::uint64_t n_paths, int workers, Fn&& fn) {
  if (workers <= 1) {
    for (std::uint64_t i = 0; i < n_paths; ++i) fn(i);
    return;
  }
#ifdef _OPENMP
  std::atomic<bool> failed{false};
  std::exception_ptr error;
#pragma omp parallel for num_threads(workers) schedule(dynamic, 8)
  for (long long i = 0; i < static_cast<long long>(n_paths); ++i) {
    if (failed.load(std::memory_order_relaxed)) continue;
    try {
      fn(static_cast<std::uint64_t>(i));
    } catch (...) {
      bool expected = false;
      if (failed.compare_exchange_strong(expected, true)) error = std::current_exception();
    }
  }
  if (failed.load()) std::rethrow_exception(error);
#else
  for (std::uint64_t i = 0; i < n_paths; ++i) fn(i);
#endif
}

}  // namespace jumplab
