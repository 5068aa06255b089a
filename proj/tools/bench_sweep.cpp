// Benchmark: OpenMP trial sweep against the serial reference on the two
// kernels that dominate experiment time (dense UA eigendecompositions and
// sphere pushforward sampling). Usage: bench_sweep [d] [trials] [samples]
#include <omp.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <vector>

#include "ringlab/conjecture.hpp"
#include "ringlab/ensembles.hpp"
#include "ringlab/linalg.hpp"
#include "ringlab/sweep.hpp"

using namespace ringlab;
using clock_type = std::chrono::steady_clock;

namespace {

double ms_since(clock_type::time_point start) {
  return std::chrono::duration<double, std::milli>(clock_type::now() - start)
      .count();
}

}  // namespace

int main(int argc, char** argv) {
  const std::size_t d = argc > 1 ? std::strtoul(argv[1], nullptr, 10) : 128;
  const std::size_t trials = argc > 2 ? std::strtoul(argv[2], nullptr, 10) : 8;
  const std::uint64_t samples =
      argc > 3 ? std::strtoull(argv[3], nullptr, 10) : 20000;

  init_runtime(0);
  const auto law = SpectralLaw::two_atom(1.0, 2.0);
  std::printf("bench: d=%zu trials=%zu samples=%llu threads=%d\n", d, trials,
              static_cast<unsigned long long>(samples), omp_get_max_threads());

  // kernel 1: full single-ring trials (Haar sample + UA eigendecomposition)
  auto ring_kernel = [&](std::size_t t) {
    return *single_ring_trial(law, d, Group::SU, RotationSpec{},
                              SeedSpec{2024, t}, 0.1)
                .record.rho;
  };
  auto start = clock_type::now();
  const auto serial_rho = run_indexed_serial(trials, ring_kernel);
  const double ring_serial_ms = ms_since(start);
  start = clock_type::now();
  const auto parallel_rho = run_indexed(trials, ring_kernel);
  const double ring_parallel_ms = ms_since(start);
  bool identical = serial_rho == parallel_rho;

  std::printf("single-ring trials : serial %9.1f ms | openmp %9.1f ms | "
              "speedup %.2fx | identical %s\n",
              ring_serial_ms, ring_parallel_ms,
              ring_serial_ms / ring_parallel_ms, identical ? "yes" : "NO");

  // kernel 2: sphere pushforward sampling
  const Matrix a = quantile_matrix(law, d);
  const int team = omp_get_max_threads();
  omp_set_num_threads(1);
  start = clock_type::now();
  const auto stats_serial =
      sphere_pushforward_stats(a, samples, SeedSpec{2025, 0}, Field::Complex);
  const double sphere_serial_ms = ms_since(start);
  omp_set_num_threads(team);
  start = clock_type::now();
  const auto stats_parallel =
      sphere_pushforward_stats(a, samples, SeedSpec{2025, 0}, Field::Complex);
  const double sphere_parallel_ms = ms_since(start);
  identical = stats_serial.norm_sq.mean == stats_parallel.norm_sq.mean &&
              stats_serial.norm_sq.variance == stats_parallel.norm_sq.variance;

  std::printf("sphere pushforward : serial %9.1f ms | openmp %9.1f ms | "
              "speedup %.2fx | identical %s\n",
              sphere_serial_ms, sphere_parallel_ms,
              sphere_serial_ms / sphere_parallel_ms, identical ? "yes" : "NO");
  return identical ? 0 : 1;
}
