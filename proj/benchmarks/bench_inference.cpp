#include <benchmark/benchmark.h>

#include "sonn/ecnn.hpp"
#include "sonn/gmdh.hpp"
#include "sonn/lmdt.hpp"
#include "sonn/ruletree.hpp"

namespace {

using namespace sonn;

// Inference on a fixed input row; the models are trained once per benchmark.
std::vector<double> first_row(const Dataset& d) {
  std::vector<double> x(d.cols());
  for (std::size_t c = 0; c < d.cols(); ++c) x[c] = d.features(0, static_cast<Eigen::Index>(c));
  return x;
}

void BM_PredictCascade(benchmark::State& state) {
  const Dataset d = gen_surrogate_eeg(400, 4, 12, 2, 7).data;
  const auto parts = split(d, {{0.5, 0.5}, 7, true});
  const CascadeNetwork net = train_ecnn(parts[0], parts[1], FitConfig{});
  const auto x = first_row(d);
  for (auto _ : state) benchmark::DoNotOptimize(predict_cascade(net, x));
}
BENCHMARK(BM_PredictCascade);

void BM_PredictPoly(benchmark::State& state) {
  const Dataset d = gen_xor(400, 8);
  const auto parts = split(d, {{0.5, 0.5}, 8, true});
  GmdhConfig cfg;
  cfg.fit.method = FitMethod::LeastSquares;
  const PolyNetwork net = train_gmdh_layered(parts[0], parts[1], cfg);
  const auto x = first_row(d);
  for (auto _ : state) benchmark::DoNotOptimize(predict_poly(net, x));
}
BENCHMARK(BM_PredictPoly);

void BM_PredictPairwise(benchmark::State& state) {
  const int classes = static_cast<int>(state.range(0));
  const Dataset d = gen_blobs(100 * static_cast<std::size_t>(classes), classes, 4, 9);
  const auto parts = split(d, {{0.5, 0.5}, 9, true});
  DtConfig cfg;
  cfg.pocket.epochs = 10;
  const PairwiseTree tree = train_pairwise_tree(parts[0], parts[1], cfg);
  const auto x = first_row(d);
  for (auto _ : state) benchmark::DoNotOptimize(predict_pairwise(tree, x));
}
BENCHMARK(BM_PredictPairwise)->Arg(3)->Arg(8);

void BM_ClassifyRule(benchmark::State& state) {
  RuleTree tree;
  tree.feature_names = {"a", "b"};
  tree.nodes.push_back({0, 0.5, true, -1, 1, 0, 1});
  tree.nodes.push_back({1, -0.25, true, -1, -1, 0, 1});
  const std::vector<double> x{0.7, 0.1};
  for (auto _ : state) benchmark::DoNotOptimize(classify_rule(tree, x));
}
BENCHMARK(BM_ClassifyRule);

}  // namespace
