// Benchmark: OpenMP-parallel client windows vs the serial reference on a
// large synthetic federation. The two paths must agree bit-for-bit; the
// interesting number is the wall-clock ratio.

#include <chrono>
#include <cstdio>

#include "drofa/algorithms.hpp"
#include "drofa/harness.hpp"
#include "drofa/objectives.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace drofa;

namespace {

double time_run(const Federation& fed, const AlgoConfig& cfg, RunResult* out) {
  auto t0 = std::chrono::steady_clock::now();
  *out = run_algorithm(fed, cfg, 42);
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

}  // namespace

int main() {
  SyntheticSpec spec;
  spec.n_clients = 32;
  spec.dim = 16;
  spec.samples_per_client = 512;
  spec.objective.kind = ObjectiveKind::logistic_regression;
  Federation fed = make_synthetic_federation(spec, 7);

  AlgoConfig cfg;
  cfg.algorithm = Algorithm::drfa;
  cfg.T = 400;
  cfg.tau = 20;
  cfg.m = 16;
  cfg.eta = 0.05;
  cfg.gamma = 0.01;
  cfg.batch_primal = 32;
  cfg.batch_probe = 32;

#ifdef _OPENMP
  std::printf("openmp threads: %d\n", omp_get_max_threads());
#else
  std::printf("openmp: not enabled\n");
#endif

  RunResult serial_result, parallel_result;
  cfg.parallel_clients = false;
  double t_serial = time_run(fed, cfg, &serial_result);
  cfg.parallel_clients = true;
  double t_parallel = time_run(fed, cfg, &parallel_result);

  bool identical =
      serial_result.w_last.values == parallel_result.w_last.values &&
      serial_result.lambda_last.weights == parallel_result.lambda_last.weights;

  std::printf("serial:   %.3f s\n", t_serial);
  std::printf("parallel: %.3f s  (speedup %.2fx)\n", t_parallel,
              t_serial / t_parallel);
  std::printf("results bit-identical: %s\n", identical ? "yes" : "NO");
  return identical ? 0 : 1;
}
