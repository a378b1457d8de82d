#ifndef SONN_GMDH_HPP
#define SONN_GMDH_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sonn/dataset.hpp"
#include "sonn/neurocore.hpp"

namespace sonn {

// Transfer polynomial of a supporting neuron.
//   Single:   w0 + w1 v1                      (one input, roulette seeds)
//   Linear:   w0 + w1 v1 + w2 v2
//   Bilinear: w0 + w1 v1 + w2 v2 + w3 v1 v2
enum class PolyKind { Single, Linear, Bilinear };

std::size_t weight_count(PolyKind kind);

// Either feature column `index` (layer 0) or neuron `index` of `layer` >= 1.
struct NodeRef {
  int layer = 0;
  int index = 0;

  static NodeRef feature(int column) { return {0, column}; }
  static NodeRef neuron(int layer, int index) { return {layer, index}; }
  bool is_feature() const { return layer == 0; }
  auto operator<=>(const NodeRef&) const = default;
};

struct SupportingNeuron {
  PolyKind kind = PolyKind::Bilinear;
  std::vector<double> weights;
  NodeRef in1;
  NodeRef in2;  // unused for PolyKind::Single

  void validate() const;
};

/// Layered polynomial network. layers[0] holds the neurons of layer 1, and a
/// neuron in layer r only reads features or neurons of layers < r.
struct PolyNetwork {
  std::vector<std::vector<SupportingNeuron>> layers;
  NodeRef output;
  std::vector<double> layer_scores;
  std::optional<double> rejected_layer_score;
  std::vector<std::string> feature_names;

  bool empty() const;
  std::size_t neuron_count() const;
  const SupportingNeuron& at(NodeRef ref) const;
  std::vector<int> referenced_features() const;
  void validate() const;
};

struct GmdhConfig {
  PolyKind kind = PolyKind::Bilinear;
  FitConfig fit;
  std::optional<int> survivors;  // F; defaults to round(0.4 * L1), clamped to [1, survivor_cap]
  int survivor_cap = 64;
  int max_layers = 10;
  int attempts = 500;  // gno, roulette variant
  std::uint64_t seed = 0;
};

// L1 = m (m - 1) / 2 two-input candidates for m inputs.
std::size_t count_candidates(std::size_t m);

double eval_supporting_neuron(const SupportingNeuron& neuron, double v1, double v2 = 0.0);

struct GmdhTrace {
  // Layered: exterior criterion of every candidate per layer (creation order)
  // and the indices of the candidates kept as survivors.
  std::vector<std::vector<double>> candidate_scores;
  std::vector<std::vector<std::size_t>> survivors;
  // Roulette: best pool accuracy after each attempt.
  std::vector<double> best_accuracy;
  std::size_t accepted = 0;
};

// Exhaustive layer-wise growth with exterior-criterion selection. With
// `prune_unused` false every surviving neuron of the retained layers is kept.
PolyNetwork train_gmdh_layered(const Dataset& train, const Dataset& val, const GmdhConfig& cfg,
                               GmdhTrace* trace = nullptr, bool prune_unused = true);

// Roulette-wheel growth: pairs drawn with probability proportional to pool
// validation accuracy, children kept only when they beat both parents.
PolyNetwork train_gmdh_roulette(const Dataset& train, const Dataset& val, const GmdhConfig& cfg,
                                GmdhTrace* trace = nullptr);

// Drops neurons the output does not depend on; layers left empty are removed.
PolyNetwork prune(const PolyNetwork& net);

double poly_raw(const PolyNetwork& net, std::span<const double> x);
Prediction predict_poly(const PolyNetwork& net, std::span<const double> x);

std::string to_polynomial_text(const PolyNetwork& net);
std::string poly_to_dot(const PolyNetwork& net);

}  // namespace sonn

#endif  // SONN_GMDH_HPP
