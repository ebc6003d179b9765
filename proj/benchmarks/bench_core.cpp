#include <benchmark/benchmark.h>

#include "frogsim/estimators.hpp"
#include "frogsim/frog.hpp"
#include "frogsim/multiwalk.hpp"
#include "frogsim/sampling.hpp"

namespace {

using namespace frogsim;

void BM_PhiloxBlock(benchmark::State& state) {
  std::uint64_t ctr = 0;
  for (auto _ : state) {
    const auto block = philox4x32(0x1234u, 7, ctr++);
    benchmark::DoNotOptimize(block);
  }
  state.SetItemsProcessed(state.iterations() * 4);
}
BENCHMARK(BM_PhiloxBlock);

void BM_WalkSteps(benchmark::State& state) {
  const Graph g = make_torus(3, static_cast<int>(state.range(0)));
  U32Stream s(derive_key(1, RngDomain::frog_walk, 0), 0);
  Vertex pos = 0;
  for (auto _ : state) {
    pos = walk_step(g, pos, WalkKernel::srw, s);
    benchmark::DoNotOptimize(pos);
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_WalkSteps)->Arg(10)->Arg(30);

void BM_FirstHitMap(benchmark::State& state) {
  const Graph g = make_torus(2, 32);
  FirstHitScratch scratch(g.n);
  const StreamKey key = frog_walk_key(3, 0);
  const std::uint32_t particles[4] = {0, 1, 2, 3};
  const Step horizon = state.range(0);
  for (auto _ : state) {
    auto map = first_hit_map(g, key, WalkKernel::srw, 5, particles, horizon, scratch);
    benchmark::DoNotOptimize(map);
  }
}
BENCHMARK(BM_FirstHitMap)->Arg(64)->Arg(512);

void BM_Susceptibility(benchmark::State& state) {
  const Graph g = make_torus(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  std::uint64_t rep = 0;
  for (auto _ : state) {
    ParticleField field(g, 1.0, g.origin, 99, rep++);
    FrogRealization real(g, field, 1.0);
    benchmark::DoNotOptimize(real.susceptibility());
  }
}
BENCHMARK(BM_Susceptibility)->Args({2, 16})->Args({3, 12})->Unit(benchmark::kMillisecond);

void BM_CoverFixedWalkers(benchmark::State& state) {
  const Graph g = make_torus(2, 20);
  std::uint64_t rep = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(cover_fixed_walkers(g, 16, 5, rep++, 1 << 20));
  }
}
BENCHMARK(BM_CoverFixedWalkers)->Unit(benchmark::kMicrosecond);

void BM_SitePercolation(benchmark::State& state) {
  const Graph g = make_torus(2, static_cast<int>(state.range(0)));
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(site_percolation(g, 0.95, seed++));
  }
}
BENCHMARK(BM_SitePercolation)->Arg(64)->Arg(128)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
