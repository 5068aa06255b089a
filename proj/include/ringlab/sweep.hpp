#pragma once

#include <cstddef>
#include <exception>
#include <type_traits>
#include <vector>

namespace ringlab {

// Index-parallel sweep over [0, n). Results land in a vector keyed by index,
// so every thread schedule yields the same output as the serial reference.
// If several indices throw, the exception of the lowest index is rethrown.
template <typename Fn>
auto run_indexed(std::size_t n, Fn&& fn, bool parallel = true)
    -> std::vector<std::invoke_result_t<Fn&, std::size_t>> {
  using T = std::invoke_result_t<Fn&, std::size_t>;
  std::vector<T> out(n);
  std::vector<std::exception_ptr> errors(n);

  if (parallel) {
#pragma omp parallel for schedule(dynamic)
    for (long long i = 0; i < static_cast<long long>(n); ++i) {
      const auto idx = static_cast<std::size_t>(i);
      try {
        out[idx] = fn(idx);
      } catch (...) {
        errors[idx] = std::current_exception();
      }
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      try {
        out[i] = fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  }

  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

// Serial reference implementation, kept for testing and benchmarking.
template <typename Fn>
auto run_indexed_serial(std::size_t n, Fn&& fn) {
  return run_indexed(n, std::forward<Fn>(fn), false);
}

// Process-wide runtime setup: caps the OpenMP team size (0 keeps the
// default) and pins the linked BLAS to one thread so sweeps own all
// parallelism and per-trial results stay schedule-independent.
void init_runtime(int omp_threads = 0);

}  // namespace ringlab
