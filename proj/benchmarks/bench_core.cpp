#include <benchmark/benchmark.h>

#include <random>

#include "ltn/bounds.hpp"
#include "ltn/convex.hpp"
#include "ltn/experiments.hpp"
#include "ltn/numerics.hpp"
#include "ltn/opt_ideal.hpp"

using namespace ltn;

namespace {

Matrix random_spd(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  Matrix g(n, n);
  for (Eigen::Index k = 0; k < g.size(); ++k) g.data()[k] = nd(rng);
  return g * g.transpose() + Matrix::Identity(n, n);
}

void BM_SymEig(benchmark::State& state) {
  const Matrix a = random_spd(static_cast<int>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(sym_eig(a));
}
BENCHMARK(BM_SymEig)->Arg(8)->Arg(30)->Arg(144);

void BM_SolveKkt(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Matrix P = random_spd(n, 2);
  const Vector p = Vector::Ones(n);
  // Pin every third coordinate, as layer masks do.
  Matrix phi = Matrix::Zero(n / 3, n);
  for (int r = 0; r < n / 3; ++r) phi(r, 3 * r) = 1.0;
  const Vector rhs = Vector::Zero(n / 3);
  for (auto _ : state) benchmark::DoNotOptimize(solve_kkt(P, p, phi, rhs));
}
BENCHMARK(BM_SolveKkt)->Arg(48)->Arg(144)->Arg(300);

void BM_ButterflyOptimize(benchmark::State& state) {
  const Scenario s = butterfly_network(butterfly_covariance(), Assignment::Direct);
  const Matrix W = build_weight_matrix(s.model);
  IdealOptions opt;
  opt.restarts = static_cast<int>(state.range(0));
  opt.threads = 1;
  for (auto _ : state) benchmark::DoNotOptimize(optimize_ideal(s.graph, s.model, W, opt).distortion);
}
BENCHMARK(BM_ButterflyOptimize)->Arg(1)->Arg(20)->Unit(benchmark::kMillisecond);

void BM_SdpRelaxation(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Matrix s = gauss_markov(n, 0.8);
  const SdpProblem prob{s, s, s, Matrix::Identity(n, n), s, 10.0 * n};
  for (auto _ : state) benchmark::DoNotOptimize(solve_sdp_relaxation(prob).value);
}
BENCHMARK(BM_SdpRelaxation)->Arg(4)->Arg(8)->Arg(12)->Unit(benchmark::kMillisecond);

void BM_CutsetScanButterfly(benchmark::State& state) {
  const Scenario s = butterfly_network(butterfly_covariance(), Assignment::Crossed);
  const Matrix W = build_weight_matrix(s.model);
  for (auto _ : state) benchmark::DoNotOptimize(cutset_scan(s.graph, s.model, W, false).bound);
}
BENCHMARK(BM_CutsetScanButterfly);

}  // namespace

BENCHMARK_MAIN();
