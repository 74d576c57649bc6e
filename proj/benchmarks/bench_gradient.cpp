#include <benchmark/benchmark.h>

#include <memory>

#include "ncprox/data_io.hpp"
#include "ncprox/estimators.hpp"
#include "ncprox/model.hpp"
#include "ncprox/synth.hpp"

namespace {

struct Instance {
  ncprox::Objective obj;
  ncprox::Vector x;
};

Instance make(std::size_t n, std::size_t d) {
  ncprox::SynthOptions so;
  so.n = n;
  so.d = d;
  so.row_nnz = 20;
  so.seed = 3;
  auto data = std::make_shared<const ncprox::Dataset>(
      ncprox::normalize_features(ncprox::synth_classification(so), ncprox::NormalizeMode::UnitRowNorm));
  const ncprox::SmoothLoss loss{ncprox::LossKind::NllsSigmoid, 1.0};
  ncprox::Objective obj(loss, ncprox::Regularizer::l0(1e-4), data, ncprox::estimate_smoothness(loss, *data));
  return {std::move(obj), ncprox::Vector::Constant(static_cast<Eigen::Index>(d), 0.1)};
}

void BM_FullGradient(benchmark::State& state) {
  const auto inst = make(static_cast<std::size_t>(state.range(0)), 500);
  for (auto _ : state) benchmark::DoNotOptimize(ncprox::full_gradient(inst.obj, inst.x));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_MinibatchGradient(benchmark::State& state) {
  const auto inst = make(10000, 500);
  ncprox::CounterRng rng(7);
  const auto m = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(ncprox::minibatch_grad(inst.obj, inst.x, m, rng));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_SarahStep(benchmark::State& state) {
  const auto inst = make(10000, 500);
  ncprox::CounterRng rng(7);
  ncprox::EstimatorState st;
  ncprox::AnchorSpec spec;
  spec.q = std::numeric_limits<std::size_t>::max();
  ncprox::sarah_anchor(inst.obj, inst.x, spec, rng, st);
  ncprox::Vector x = inst.x;
  const auto s2 = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    x[0] += 1e-6;
    benchmark::DoNotOptimize(ncprox::sarah_step(inst.obj, st, x, s2, rng));
  }
  state.SetItemsProcessed(state.iterations() * 2 * state.range(0));
}

}  // namespace

BENCHMARK(BM_FullGradient)->Range(1 << 10, 1 << 16);
BENCHMARK(BM_MinibatchGradient)->Range(1, 1 << 10);
BENCHMARK(BM_SarahStep)->Range(1, 1 << 10);
