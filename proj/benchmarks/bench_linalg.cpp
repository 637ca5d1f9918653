#include "silver/linalg.hpp"
#include "silver/manifolds.hpp"
#include "silver/objectives.hpp"
#include "silver/rng.hpp"

#include <benchmark/benchmark.h>

namespace {

using namespace silver;

SpdMatrix random_spd(Eigen::Index d, std::uint64_t seed) { return make_sigma_star(d, 1.0, 1e-3, seed); }

void BM_SpdSqrt(benchmark::State& state) {
  const auto d = static_cast<Eigen::Index>(state.range(0));
  const SymMatrix m(random_spd(d, 1).matrix());
  for (auto _ : state) benchmark::DoNotOptimize(spd_sqrt(SpdMatrix(m)));
}
BENCHMARK(BM_SpdSqrt)->Arg(2)->Arg(10)->Arg(50);

void BM_SymEigenvalues(benchmark::State& state) {
  const auto d = static_cast<Eigen::Index>(state.range(0));
  const SymMatrix m(random_spd(d, 2).matrix());
  for (auto _ : state) benchmark::DoNotOptimize(sym_eigenvalues(m));
}
BENCHMARK(BM_SymEigenvalues)->Arg(10)->Arg(100);

void BM_BwExpLog(benchmark::State& state) {
  const auto d = static_cast<Eigen::Index>(state.range(0));
  const Manifold& bw = manifold_for(ManifoldKind::bures_wasserstein);
  const Point x = Point::gaussian(Vector::Zero(d), SymMatrix(random_spd(d, 3).matrix()));
  CounterRng rng(4, 0);
  const Point y = Point::gaussian(normal_vector(rng, d), SymMatrix(random_spd(d, 5).matrix()));
  for (auto _ : state) {
    const Tangent v = bw.log(x, y);
    benchmark::DoNotOptimize(bw.exp(x, v));
  }
}
BENCHMARK(BM_BwExpLog)->Arg(2)->Arg(10);

void BM_BwDist(benchmark::State& state) {
  const auto d = static_cast<Eigen::Index>(state.range(0));
  const Manifold& bw = manifold_for(ManifoldKind::bures_wasserstein);
  const Point x = Point::gaussian(Vector::Zero(d), SymMatrix(random_spd(d, 6).matrix()));
  const Point y = Point::gaussian(Vector::Ones(d), SymMatrix(random_spd(d, 7).matrix()));
  for (auto _ : state) benchmark::DoNotOptimize(bw.dist(x, y));
}
BENCHMARK(BM_BwDist)->Arg(2)->Arg(10);

}  // namespace

BENCHMARK_MAIN();
