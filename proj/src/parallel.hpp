#pragma once

#include <cstddef>
#include <exception>
#include <mutex>

namespace eigenopt::detail {

/// Runs body(i) for i in [0, n) on OpenMP threads. The first exception thrown
/// by any iteration is rethrown on the calling thread once the loop finishes.
template <typename Body>
void parallel_for(std::size_t n, Body&& body) {
  std::exception_ptr error;
  std::mutex error_mutex;
  const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic)
  for (long long i = 0; i < count; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mutex);
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace eigenopt::detail
