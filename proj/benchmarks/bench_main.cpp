#include <benchmark/benchmark.h>

#include <Eigen/Dense>

#include "ppmsdp/certificate.hpp"
#include "ppmsdp/linalg.hpp"
#include "ppmsdp/model.hpp"
#include "ppmsdp/rng.hpp"
#include "ppmsdp/sdp.hpp"
#include "ppmsdp/thresholds.hpp"

namespace {

ppm::PlantedPartitionParams params(int n) {
  ppm::PlantedPartitionParams p;
  p.n = n;
  p.r = 2;
  p.pi = {0.5, 0.5};
  p.p_tilde = 20.0;
  p.q_tilde = 2.0;
  return p;
}

void BM_ProjectPsd(benchmark::State& state) {
  const auto n = static_cast<Eigen::Index>(state.range(0));
  ppm::SplitMix64 rng(1);
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) m(i, j) = m(j, i) = rng.uniform01() - 0.5;
  }
  for (auto _ : state) benchmark::DoNotOptimize(ppm::project_psd(m));
}
BENCHMARK(BM_ProjectPsd)->Arg(100)->Arg(200)->Arg(400)->Unit(benchmark::kMillisecond);

void BM_SamplePpm(benchmark::State& state) {
  const auto prm = params(static_cast<int>(state.range(0)));
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(ppm::sample_ppm(prm, ++seed));
}
BENCHMARK(BM_SamplePpm)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_SolveUnknownSizes(benchmark::State& state) {
  const auto prm = params(static_cast<int>(state.range(0)));
  const ppm::PlantedSample s = ppm::sample_ppm(prm, 3);
  const ppm::SdpProblem problem = ppm::build_unknown_sizes(s.graph, 2, ppm::regime_constants(prm).omega);
  int iterations = 0;
  for (auto _ : state) {
    const ppm::SdpSolution sol = ppm::solve(problem);
    iterations = sol.iterations;
    benchmark::DoNotOptimize(sol.objective);
  }
  state.counters["iterations"] = iterations;
}
BENCHMARK(BM_SolveUnknownSizes)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_SolveIteration(benchmark::State& state) {
  const auto prm = params(static_cast<int>(state.range(0)));
  const ppm::PlantedSample s = ppm::sample_ppm(prm, 3);
  const ppm::SdpProblem problem = ppm::build_known_sizes(s.graph, s.truth.sizes());
  ppm::SolverOptions opt;
  opt.max_iters = 1;
  for (auto _ : state) benchmark::DoNotOptimize(ppm::solve(problem, opt).objective);
}
BENCHMARK(BM_SolveIteration)->Arg(100)->Arg(200)->Arg(400)->Unit(benchmark::kMillisecond);

void BM_Certificate(benchmark::State& state) {
  const auto prm = params(static_cast<int>(state.range(0)));
  const ppm::PlantedSample s = ppm::sample_ppm(prm, 5);
  for (auto _ : state) {
    const ppm::DualCertificate cert = ppm::build_certificate(s.graph, s.truth, prm);
    benchmark::DoNotOptimize(ppm::verify_certificate(s.graph, s.truth, cert).verified);
  }
}
BENCHMARK(BM_Certificate)->Arg(100)->Arg(200)->Arg(400)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
