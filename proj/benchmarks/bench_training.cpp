#include <benchmark/benchmark.h>

#include "sonn/baseline.hpp"
#include "sonn/ecnn.hpp"
#include "sonn/gmdh.hpp"
#include "sonn/lmdt.hpp"

namespace {

using namespace sonn;

struct Parts {
  Dataset fit;
  Dataset val;
};

Parts prepare(const Dataset& data, std::uint64_t seed) {
  auto parts = split(data, {{2.0 / 3.0, 1.0 / 3.0}, seed, true});
  const NormParams norm = fit_zscore(parts[0]);
  return {norm.apply(parts[0]), norm.apply(parts[1])};
}

void BM_FitNeuron(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Parts p = prepare(gen_surrogate_eeg(n, 3, 0, 2, 1).data, 1);
  std::vector<double> targets(p.fit.labels.begin(), p.fit.labels.end());
  SigmoidNeuron neuron;
  for (int f = 0; f < 3; ++f) neuron.inputs.push_back(InputRef::feature(f));
  FitConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(fit_neuron(neuron, p.fit.features, targets, cfg));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(p.fit.rows()));
}
BENCHMARK(BM_FitNeuron)->Arg(300)->Arg(3000)->Unit(benchmark::kMillisecond);

void BM_TrainEcnn(benchmark::State& state) {
  const auto noise = static_cast<std::size_t>(state.range(0));
  const Parts p = prepare(gen_surrogate_eeg(600, 4, noise, 2, 2).data, 2);
  FitConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(train_ecnn(p.fit, p.val, cfg));
}
BENCHMARK(BM_TrainEcnn)->Arg(8)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_GmdhLayered(benchmark::State& state) {
  const auto noise = static_cast<std::size_t>(state.range(0));
  const Parts p = prepare(gen_surrogate_eeg(600, 4, noise, 2, 3).data, 3);
  GmdhConfig cfg;
  cfg.fit.method = FitMethod::LeastSquares;
  for (auto _ : state) benchmark::DoNotOptimize(train_gmdh_layered(p.fit, p.val, cfg));
}
BENCHMARK(BM_GmdhLayered)->Arg(8)->Arg(24)->Unit(benchmark::kMillisecond);

void BM_PocketRatchet(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Dataset d = gen_separable(n, 3, 2, 4);
  PocketConfig cfg;
  cfg.seed = 4;
  for (auto _ : state) benchmark::DoNotOptimize(train_linear_machine(d, cfg));
}
BENCHMARK(BM_PocketRatchet)->Arg(150)->Arg(600)->Unit(benchmark::kMillisecond);

void BM_PairwiseTree(benchmark::State& state) {
  const int classes = static_cast<int>(state.range(0));
  const Parts p = prepare(gen_blobs(200 * static_cast<std::size_t>(classes), classes, 4, 5), 5);
  DtConfig cfg;
  cfg.seed = 5;
  for (auto _ : state) benchmark::DoNotOptimize(train_pairwise_tree(p.fit, p.val, cfg));
}
BENCHMARK(BM_PairwiseTree)->Arg(3)->Arg(6)->Unit(benchmark::kMillisecond);

void BM_TrainFnn(benchmark::State& state) {
  const Parts p = prepare(gen_surrogate_eeg(600, 4, 28, 2, 6).data, 6);
  FnnConfig cfg;
  cfg.restarts = 1;
  cfg.max_epochs = static_cast<int>(state.range(0));
  cfg.patience = cfg.max_epochs;
  for (auto _ : state) benchmark::DoNotOptimize(train_fnn(p.fit, p.val, cfg));
}
BENCHMARK(BM_TrainFnn)->Arg(200)->Unit(benchmark::kMillisecond);

}  // namespace
