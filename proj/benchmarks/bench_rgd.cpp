#include "silver/objectives.hpp"
#include "silver/optimizer.hpp"
#include "silver/rng.hpp"

#include <benchmark/benchmark.h>

#include <memory>

namespace {

using namespace silver;

void BM_RgdBwPotential(benchmark::State& state) {
  const Eigen::Index d = 10;
  const auto n = static_cast<std::uint64_t>(state.range(0));
  const QuadraticPotentialBW f(make_m_star(d, 0), make_sigma_star(d, 1.0, 1e-3, 0));
  const Point x0 = Point::gaussian(Vector::Zero(d), SymMatrix::identity(d));
  const StepSchedule s = silver_prefix(n);
  for (auto _ : state) benchmark::DoNotOptimize(rgd_run(f, s, x0, n));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n));
}
BENCHMARK(BM_RgdBwPotential)->Arg(127)->Arg(1023)->Unit(benchmark::kMillisecond);

void BM_RgdRayleigh(benchmark::State& state) {
  const auto d = static_cast<Eigen::Index>(state.range(0));
  const RayleighSphere f(make_rayleigh_h(d, RayleighKind::wigner, 0));
  CounterRng rng(0, 31);
  const Point x0 = Point::sphere(uniform_sphere(rng, d));
  const StepSchedule s = silver_prefix(1000).with_smoothness(f.smoothness());
  for (auto _ : state) benchmark::DoNotOptimize(rgd_run(f, s, x0, 1000));
}
BENCHMARK(BM_RgdRayleigh)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_RgdMeanField(benchmark::State& state) {
  MeanFieldProblem p = make_meanfield_problem(MeanFieldTarget::sin, 200, 0.7, 0);
  const MeanFieldNet f(100, std::move(p.train), 100.0);
  const Point x0 = Point::euclidean(make_meanfield_init(100, 0));
  const StepSchedule s = silver_prefix(200).with_smoothness(100.0);
  for (auto _ : state) benchmark::DoNotOptimize(rgd_run(f, s, x0, 200));
}
BENCHMARK(BM_RgdMeanField)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
