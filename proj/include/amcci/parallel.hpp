#pragma once

#include <cstddef>
#include <exception>
#include <mutex>

#include <omp.h>

namespace amcci {

/// Number of OpenMP workers to use; 0 means "all available".
inline int resolve_workers(int requested) {
  return requested > 0 ? requested : omp_get_max_threads();
}

/// Runs body(i) for i in [0, n) on `workers` OpenMP threads. Iterations must
/// write only to index-owned state; results are then independent of the
/// schedule. The first exception thrown by any iteration is rethrown.
template <class Body>
void parallel_for(std::size_t n, int workers, Body&& body) {
  std::exception_ptr error;
  std::mutex error_mutex;
  const long long count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic, 1) num_threads(resolve_workers(workers))
  for (long long i = 0; i < count; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      std::lock_guard lock(error_mutex);
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace amcci
