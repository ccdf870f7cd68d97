// Serial vs OpenMP timing of the two data-parallel kernels on the reference
// profile. Usage: bench_kernels [repetitions]

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>

#include "qdent/config.hpp"
#include "qdent/emission.hpp"

namespace {

double best_of(int reps, const std::function<void()>& f) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  return best;
}

}  // namespace

int main(int argc, char** argv) {
  const int reps = argc > 1 ? std::max(1, std::atoi(argv[1])) : 5;
  const qdent::Config cfg = qdent::parse_config(qdent::reference_config_text());
  const qdent::EmissionParams params = cfg.emission_params();
  const std::vector<double> grid = cfg.tau_grid();

  const qdent::CorrelationSet traces = qdent::g2_traces_serial(params, grid);
  const std::vector<double>& trace = traces.traces[0];

  std::printf("threads available: %d, grid points: %zu, repetitions: %d\n", omp_get_max_threads(),
              grid.size(), reps);
  const double g2_serial = best_of(reps, [&] { qdent::g2_traces_serial(params, grid); });
  const double g2_parallel = best_of(reps, [&] { qdent::g2_traces(params, grid); });
  std::printf("g2_traces      serial %9.3f ms  parallel %9.3f ms  speedup %.2fx\n", 1e3 * g2_serial,
              1e3 * g2_parallel, g2_serial / g2_parallel);

  const double conv_serial =
      best_of(reps * 20, [&] { qdent::convolve_irf_serial(trace, params.irf_fwhm, cfg.tau_step_ns); });
  const double conv_parallel =
      best_of(reps * 20, [&] { qdent::convolve_irf(trace, params.irf_fwhm, cfg.tau_step_ns); });
  std::printf("convolve_irf   serial %9.3f ms  parallel %9.3f ms  speedup %.2fx\n", 1e3 * conv_serial,
              1e3 * conv_parallel, conv_serial / conv_parallel);
  return 0;
}
