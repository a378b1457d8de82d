#ifndef SONN_ECNN_HPP
#define SONN_ECNN_HPP

#include <span>
#include <string>
#include <vector>

#include "sonn/dataset.hpp"
#include "sonn/neurocore.hpp"

namespace sonn {

// Single-input neurons ranked by validation error, ascending; ties keep the
// lower column index first.
struct FeatureRanking {
  std::vector<int> order;
  std::vector<double> errors;  // indexed by column
  std::vector<SigmoidNeuron> neurons;  // indexed by column
  double best_error = 0.0;
};

FeatureRanking rank_single_features(const Dataset& train, const Dataset& val, const FitConfig& cfg);

// A candidate is kept only when it strictly lowers the error.
bool relevance_check(double candidate, double incumbent);

/// Evolving cascade network. Neuron t reads the anchor feature, the feature it
/// introduced and the outputs of neurons 0..t-1, in that order. When no
/// candidate was ever accepted the network is the best single-input neuron.
struct CascadeNetwork {
  int anchor_feature = 0;
  std::vector<SigmoidNeuron> neurons;
  std::vector<double> accepted_scores;
  std::vector<int> feature_order;
  std::vector<double> feature_errors;
  std::vector<std::string> feature_names;
  double decision_threshold = 0.5;

  bool single_neuron() const { return neurons.size() == 1 && neurons[0].inputs.size() == 1; }
  // Feature columns bound anywhere in the network, in order of introduction.
  std::vector<int> selected_features() const;
};

struct CascadeStep {
  int feature = 0;
  double score = 0.0;
  bool accepted = false;
};

CascadeNetwork train_ecnn(const Dataset& train, const Dataset& val, const FitConfig& cfg,
                          std::vector<CascadeStep>* trace = nullptr);

Prediction predict_cascade(const CascadeNetwork& net, std::span<const double> x);

std::string describe_cascade(const CascadeNetwork& net);
std::string cascade_to_dot(const CascadeNetwork& net);

}  // namespace sonn

#endif  // SONN_ECNN_HPP
