#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "georoute/analytics.hpp"
#include "georoute/geometry.hpp"
#include "georoute/pointprocess.hpp"
#include "georoute/random.hpp"
#include "georoute/routing.hpp"

using namespace georoute;

namespace {

NetworkConfig dense_config(double lambda) {
  NetworkConfig cfg;
  cfg.lambda = lambda;
  cfg.radius = critical_radius(lambda, 1.0, 2.0 * kPi).radius;
  cfg.seed = 1;
  return cfg;
}

void BM_SampleField(benchmark::State& state) {
  const NetworkConfig cfg = dense_config(static_cast<double>(state.range(0)));
  for (auto _ : state) {
    Rng rng(cfg.seed);
    benchmark::DoNotOptimize(sample_field(cfg, rng));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SampleField)->Arg(10'000)->Arg(100'000)->Arg(1'000'000)->Unit(benchmark::kMillisecond);

void BM_NeighborsInWedge(benchmark::State& state) {
  const NetworkConfig cfg = dense_config(static_cast<double>(state.range(0)));
  Rng rng(cfg.seed);
  const NodeField field = sample_field(cfg, rng);
  std::vector<std::size_t> out;
  Rng pick(7);
  for (auto _ : state) {
    const double r = 0.5 * field.region_radius() * std::sqrt(pick.uniform());
    const double a = kTwoPi * pick.uniform();
    neighbors_in_wedge(field, Wedge({r * std::cos(a), r * std::sin(a)}, kTwoPi * pick.uniform(), 0.5, cfg.radius), out);
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_NeighborsInWedge)->Arg(100'000)->Arg(1'000'000);

void BM_RouteRandomHalfDisk(benchmark::State& state) {
  const NetworkConfig cfg = dense_config(static_cast<double>(state.range(0)));
  const std::vector<Point2> pins = {{-0.25, -0.25}, {0.25, 0.25}};
  Rng rng(cfg.seed);
  const NodeField field = sample_field(cfg, rng, pins);
  const std::size_t src = field.size() - 2;
  const std::size_t dst = field.size() - 1;
  const std::size_t cap = default_max_hops(std::sqrt(0.125), cfg.radius);
  Rng walk(3);
  std::size_t hops = 0;
  for (auto _ : state) {
    const RouteRecord rec = route(field, src, dst, SchemeSpec{}, cfg.radius, walk, cap);
    hops += rec.nu();
  }
  state.counters["hops_per_route"] = benchmark::Counter(static_cast<double>(hops), benchmark::Counter::kAvgIterations);
}
BENCHMARK(BM_RouteRandomHalfDisk)->Arg(100'000)->Arg(1'000'000)->Unit(benchmark::kMillisecond);

void BM_WedgeIntersectionArea(benchmark::State& state) {
  const double eta = static_cast<double>(state.range(0)) / 100.0;
  Rng rng(11);
  for (auto _ : state) {
    const Wedge a({0, 0}, kTwoPi * rng.uniform(), eta, 1.0);
    const Wedge b({2 * rng.uniform() - 1, 2 * rng.uniform() - 1}, kTwoPi * rng.uniform(), eta, 1.0);
    benchmark::DoNotOptimize(wedge_intersection_area(a, b));
  }
}
BENCHMARK(BM_WedgeIntersectionArea)->Arg(50)->Arg(75)->Arg(100);

void BM_LengthBounds(benchmark::State& state) {
  double lambda = 1e3;
  for (auto _ : state) {
    const double r = critical_radius(lambda, 1.0, 2.0 * kPi).radius;
    benchmark::DoNotOptimize(expected_length_bounds(std::sqrt(0.5), r));
    benchmark::DoNotOptimize(variance_bounds(std::sqrt(0.5), r));
    lambda = lambda > 1e9 ? 1e3 : lambda * 1.1;
  }
}
BENCHMARK(BM_LengthBounds);

}  // namespace

BENCHMARK_MAIN();
