#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "lcoal/bridge.hpp"
#include "lcoal/chain.hpp"
#include "lcoal/flow.hpp"
#include "lcoal/measures.hpp"
#include "lcoal/rng.hpp"

using namespace lcoal;

namespace {

void bm_merger_rate_quadrature(benchmark::State& state) {
  const MeasureSpec m = MeasureSpec::x_squared();
  const int i = int(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(merger_rate(m, i, i / 2 + 1));
}
BENCHMARK(bm_merger_rate_quadrature)->Arg(10)->Arg(100)->Arg(1000);

void bm_mu_star(benchmark::State& state) {
  const MeasureSpec m = MeasureSpec::beta_family(1.5);
  const int i_max = int(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(mu_star(m, 1e-10, i_max).value);
}
BENCHMARK(bm_mu_star)->Arg(1000)->Arg(10000);

void bm_compose_chain(benchmark::State& state) {
  // tracked composition of `factors` nu-distributed simple bridges
  const MeasureSpec m = MeasureSpec::beta_family(0.5);
  const NuSampler sampler(m, std::ldexp(1.0, -8), 1.0);
  const long factors = state.range(0);
  for (auto _ : state) {
    Stream xs(1, 0, Lane::poisson_points);
    Stream us(1, 0, Lane::composition_u);
    FiniteBridge b;
    for (long i = 0; i < factors; ++i) {
      const double x = sampler.sample(xs);
      for (int attempt = 0; attempt < 16; ++attempt) {
        try {
          b = compose_tracked(b, x, us.next_double()).result;
          break;
        } catch (const BoundaryCollision&) {
        }
      }
    }
    benchmark::DoNotOptimize(b.slope());
  }
  state.SetItemsProcessed(state.iterations() * factors);
}
BENCHMARK(bm_compose_chain)->Arg(16)->Arg(64)->Arg(256);

void bm_chain_replicate(benchmark::State& state) {
  const MeasureSpec m = MeasureSpec::beta_family(1.5);
  const int n = int(state.range(0));
  const MergerRateTable table(m, n);
  std::uint32_t rep = 0;
  for (auto _ : state) {
    Stream rng(2, rep++, Lane::chain_events);
    benchmark::DoNotOptimize(
        simulate_chain(table, n, 1e9, {}, rng).events.size());
  }
}
BENCHMARK(bm_chain_replicate)->Arg(10)->Arg(100)->Arg(1000);

void bm_paintbox(benchmark::State& state) {
  FiniteBridge b = FiniteBridge::make(0.5, {{0.3, 0.3}, {0.7, 0.2}});
  const int n = int(state.range(0));
  std::uint32_t rep = 0;
  for (auto _ : state) {
    Stream rng(3, rep++, Lane::paintbox_v);
    benchmark::DoNotOptimize(paintbox(b, n, rng).block_count());
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(bm_paintbox)->Arg(100)->Arg(10000);

void bm_flow_levels(benchmark::State& state) {
  const MeasureSpec m = MeasureSpec::beta_family(0.5);
  std::vector<double> grid;
  for (int j = 2; j <= 2 + state.range(0); ++j)
    grid.push_back(std::ldexp(1.0, -int(j)));
  const LayerSamplers samplers(m, grid);
  std::uint32_t rep = 0;
  for (auto _ : state)
    benchmark::DoNotOptimize(
        run_flow_levels(samplers, 1.0, {0.0, 0.01}, 4, rep++, false)
            .dust_by_level.back()
            .second);
}
BENCHMARK(bm_flow_levels)->Arg(2)->Arg(6);

}  // namespace

BENCHMARK_MAIN();
