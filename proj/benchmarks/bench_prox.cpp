#include <benchmark/benchmark.h>

#include "ncprox/regularizer.hpp"
#include "ncprox/rng.hpp"

namespace {

ncprox::Vector random_input(std::int64_t d) {
  ncprox::CounterRng rng(1);
  ncprox::Vector x(d);
  for (std::int64_t j = 0; j < d; ++j) x[j] = 3.0 * rng.normal();
  return x;
}

void run(benchmark::State& state, const ncprox::Regularizer& r) {
  const auto x = random_input(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(ncprox::prox_apply(r, x, 0.5));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_ProxL0(benchmark::State& s) { run(s, ncprox::Regularizer::l0(0.1)); }
void BM_ProxHalf(benchmark::State& s) { run(s, ncprox::Regularizer::l_half(0.1)); }
void BM_ProxTwoThirds(benchmark::State& s) { run(s, ncprox::Regularizer::l_two_thirds(0.1)); }
void BM_ProxQuantization(benchmark::State& s) {
  run(s, ncprox::Regularizer::quantization(1.0, {-1.0, -0.5, 0.0, 0.5, 1.0}));
}
void BM_ProxL0Ball(benchmark::State& s) {
  run(s, ncprox::Regularizer::l0_ball(static_cast<std::size_t>(s.range(0) / 5)));
}

}  // namespace

BENCHMARK(BM_ProxL0)->Range(1 << 8, 1 << 16);
BENCHMARK(BM_ProxHalf)->Range(1 << 8, 1 << 16);
BENCHMARK(BM_ProxTwoThirds)->Range(1 << 8, 1 << 16);
BENCHMARK(BM_ProxQuantization)->Range(1 << 8, 1 << 16);
BENCHMARK(BM_ProxL0Ball)->Range(1 << 8, 1 << 16);
