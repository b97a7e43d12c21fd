#include <benchmark/benchmark.h>

#include "tph/kernels.hpp"
#include "tph/regions.hpp"

using namespace tph;

namespace {

struct Fixture {
  TorusEndo f = build_concrete();
  double eps = find_epsilon(f).eps;
  Regions regions{f};
  UnstableCones cones{f, eps, find_delta(f, regions, eps).delta};
};

const Fixture& fixture() {
  static const Fixture fx;
  return fx;
}

Exec exec_of(const benchmark::State& s) { return s.range(1) ? Exec::parallel : Exec::serial; }

void BM_Invariance(benchmark::State& state) {
  const Fixture& fx = fixture();
  const ConeField field = fx.cones.field();
  for (auto _ : state) {
    const InvarianceReport r = certify_invariance(fx.f, field, int(state.range(0)), exec_of(state));
    benchmark::DoNotOptimize(r.min_margin);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}

void BM_Expansion(benchmark::State& state) {
  const Fixture& fx = fixture();
  const ConeField field = fx.cones.field();
  for (auto _ : state) {
    const ExpansionReport r = certify_expansion(fx.f, field, 20, int(state.range(0)), exec_of(state));
    benchmark::DoNotOptimize(r.growth);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}

void BM_SlopeGrid(benchmark::State& state) {
  const Fixture& fx = fixture();
  for (auto _ : state) {
    const std::vector<SlopeClass> g = slope_grid(fx.f, int(state.range(0)), exec_of(state));
    benchmark::DoNotOptimize(g.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}

}  // namespace

// Second argument: 0 serial, 1 OpenMP.
BENCHMARK(BM_Invariance)->ArgsProduct({{128, 512}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Expansion)->ArgsProduct({{64, 256}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SlopeGrid)->ArgsProduct({{64, 128}, {0, 1}})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
