#include "sonn/ecnn.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "sonn/errors.hpp"
#include "sonn/random.hpp"

namespace sonn {

namespace {

std::vector<int> predicted_classes(const Eigen::VectorXd& outputs, double threshold) {
  std::vector<int> out(static_cast<std::size_t>(outputs.size()));
  for (Eigen::Index i = 0; i < outputs.size(); ++i) {
    out[static_cast<std::size_t>(i)] = outputs(i) >= threshold ? 1 : 0;
  }
  return out;
}

double validation_error(const SigmoidNeuron& neuron, const Eigen::MatrixXd& inputs,
                        const std::vector<int>& labels, double threshold) {
  const Eigen::Map<const Eigen::VectorXd> w(neuron.weights.data(),
                                            static_cast<Eigen::Index>(neuron.weights.size()));
  return classification_error(predicted_classes(sigmoid_outputs(w, inputs), threshold), labels);
}

std::string fixed4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

void check_inputs(const Dataset& train, const Dataset& val) {
  if (train.cols() < 2) throw DataError("ecnn: need >= 2 features");
  if (val.rows() == 0) throw DataError("ecnn: empty validation set");
  if (val.cols() != train.cols()) throw DataError("ecnn: train/validation column mismatch");
  if (train.class_count() != 2) throw DataError("ecnn: binary classification only");
}

}  // namespace

FeatureRanking rank_single_features(const Dataset& train, const Dataset& val, const FitConfig& cfg) {
  check_inputs(train, val);
  const auto targets = train.binary_targets();
  const auto m = static_cast<int>(train.cols());
  FeatureRanking ranking;
  ranking.errors.resize(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j) {
    FitConfig c = cfg;
    c.seed = mix_seed(cfg.seed, static_cast<std::uint64_t>(j), 1);
    SigmoidNeuron neuron{{0.0, 0.0}, {InputRef::feature(j)}};
    neuron = fit_neuron(std::move(neuron), train.features.col(j), targets, c);
    ranking.errors[static_cast<std::size_t>(j)] =
        validation_error(neuron, val.features.col(j), val.labels, cfg.decision_threshold);
    ranking.neurons.push_back(std::move(neuron));
  }
  ranking.order.resize(static_cast<std::size_t>(m));
  std::iota(ranking.order.begin(), ranking.order.end(), 0);
  std::stable_sort(ranking.order.begin(), ranking.order.end(), [&](int a, int b) {
    return ranking.errors[static_cast<std::size_t>(a)] < ranking.errors[static_cast<std::size_t>(b)];
  });
  ranking.best_error = ranking.errors[static_cast<std::size_t>(ranking.order.front())];
  return ranking;
}

bool relevance_check(double candidate, double incumbent) { return candidate < incumbent; }

std::vector<int> CascadeNetwork::selected_features() const {
  std::vector<int> out;
  for (const auto& neuron : neurons) {
    for (const auto& ref : neuron.inputs) {
      if (ref.is_feature() && std::find(out.begin(), out.end(), ref.index) == out.end()) {
        out.push_back(ref.index);
      }
    }
  }
  return out;
}

CascadeNetwork train_ecnn(const Dataset& train, const Dataset& val, const FitConfig& cfg,
                          std::vector<CascadeStep>* trace) {
  cfg.validate();
  const FeatureRanking ranking = rank_single_features(train, val, cfg);
  const auto targets = train.binary_targets();

  CascadeNetwork net;
  net.anchor_feature = ranking.order.front();
  net.feature_order = ranking.order;
  net.feature_errors = ranking.errors;
  net.feature_names = train.feature_names;
  net.decision_threshold = cfg.decision_threshold;

  // Outputs of accepted neurons on the fitting and validation rows.
  std::vector<Eigen::VectorXd> train_out;
  std::vector<Eigen::VectorXd> val_out;
  double incumbent = ranking.best_error;

  for (std::size_t h = 1; h < ranking.order.size(); ++h) {
    const int feature = ranking.order[h];
    const auto r = static_cast<Eigen::Index>(net.neurons.size());

    SigmoidNeuron candidate;
    candidate.inputs = {InputRef::feature(net.anchor_feature), InputRef::feature(feature)};
    for (int t = 0; t < r; ++t) candidate.inputs.push_back(InputRef::neuron(t));
    candidate.weights.assign(candidate.inputs.size() + 1, 0.0);

    Eigen::MatrixXd fit_in(train.features.rows(), r + 2);
    Eigen::MatrixXd val_in(val.features.rows(), r + 2);
    fit_in.col(0) = train.features.col(net.anchor_feature);
    fit_in.col(1) = train.features.col(feature);
    val_in.col(0) = val.features.col(net.anchor_feature);
    val_in.col(1) = val.features.col(feature);
    for (Eigen::Index t = 0; t < r; ++t) {
      fit_in.col(t + 2) = train_out[static_cast<std::size_t>(t)];
      val_in.col(t + 2) = val_out[static_cast<std::size_t>(t)];
    }

    FitConfig c = cfg;
    c.seed = mix_seed(cfg.seed, static_cast<std::uint64_t>(h), 2);
    candidate = fit_neuron(std::move(candidate), fit_in, targets, c);
    const double score = validation_error(candidate, val_in, val.labels, cfg.decision_threshold);
    const bool accept = relevance_check(score, incumbent);
    if (trace) trace->push_back({feature, score, accept});
    if (!accept) continue;

    const Eigen::Map<const Eigen::VectorXd> w(candidate.weights.data(),
                                              static_cast<Eigen::Index>(candidate.weights.size()));
    train_out.push_back(sigmoid_outputs(w, fit_in));
    val_out.push_back(sigmoid_outputs(w, val_in));
    incumbent = score;
    net.accepted_scores.push_back(score);
    net.neurons.push_back(std::move(candidate));
  }

  if (net.neurons.empty()) {
    net.neurons.push_back(ranking.neurons[static_cast<std::size_t>(net.anchor_feature)]);
    net.accepted_scores.push_back(ranking.best_error);
  }
  return net;
}

Prediction predict_cascade(const CascadeNetwork& net, std::span<const double> x) {
  if (net.neurons.empty()) throw std::invalid_argument("predict_cascade: untrained model");
  std::vector<double> z;
  std::vector<double> u;
  for (const auto& neuron : net.neurons) {
    u.clear();
    for (const auto& ref : neuron.inputs) {
      if (ref.is_feature()) {
        if (ref.index < 0 || static_cast<std::size_t>(ref.index) >= x.size()) {
          throw DataError("predict_cascade: missing feature column " + std::to_string(ref.index));
        }
        u.push_back(x[static_cast<std::size_t>(ref.index)]);
      } else {
        u.push_back(z.at(static_cast<std::size_t>(ref.index)));
      }
    }
    z.push_back(sigmoid_out(neuron, u));
  }
  const double score = z.back();
  return {score >= net.decision_threshold ? 1 : 0, score};
}

namespace {

std::string input_name(const CascadeNetwork& net, const InputRef& ref) {
  if (ref.is_feature()) return net.feature_names.at(static_cast<std::size_t>(ref.index));
  return "z_" + std::to_string(ref.index + 1);
}

// Prior outputs newest first, then the anchor and the new feature.
std::vector<std::size_t> display_order(const SigmoidNeuron& neuron) {
  std::vector<std::size_t> order;
  for (std::size_t i = neuron.inputs.size(); i-- > 0;) {
    if (!neuron.inputs[i].is_feature()) order.push_back(i);
  }
  for (std::size_t i = 0; i < neuron.inputs.size(); ++i) {
    if (neuron.inputs[i].is_feature()) order.push_back(i);
  }
  return order;
}

}  // namespace

std::string describe_cascade(const CascadeNetwork& net) {
  std::ostringstream out;
  for (std::size_t t = 0; t < net.neurons.size(); ++t) {
    const auto& neuron = net.neurons[t];
    const auto order = display_order(neuron);
    out << "z_" << t + 1 << ": ";
    for (std::size_t k = 0; k < order.size(); ++k) {
      if (k) out << " & ";
      out << input_name(net, neuron.inputs[order[k]]);
    }
    const double accuracy = 1.0 - net.accepted_scores.at(t);
    out << " -> p_" << t + 1 << " = " << fixed4(accuracy);
    if (t + 1 == net.neurons.size()) out << " (y)";
    out << "  |w|: bias " << fixed4(std::abs(neuron.weights[0]));
    for (const std::size_t i : order) {
      out << ", " << input_name(net, neuron.inputs[i]) << ' '
          << fixed4(std::abs(neuron.weights[i + 1]));
    }
    out << '\n';
  }
  return out.str();
}

std::string cascade_to_dot(const CascadeNetwork& net) {
  std::ostringstream out;
  out << "digraph cascade {\n  rankdir=LR;\n";
  for (const int f : net.selected_features()) {
    out << "  x" << f << " [shape=ellipse, label=\""
        << net.feature_names.at(static_cast<std::size_t>(f)) << "\"];\n";
  }
  for (std::size_t t = 0; t < net.neurons.size(); ++t) {
    const bool output = t + 1 == net.neurons.size();
    out << "  z" << t << " [shape=box, style=filled, fillcolor=gray80, label=\"z_" << t + 1
        << (output ? " = y" : "") << "\"" << (output ? ", peripheries=2" : "") << "];\n";
  }
  for (std::size_t t = 0; t < net.neurons.size(); ++t) {
    const auto& neuron = net.neurons[t];
    for (std::size_t i = 0; i < neuron.inputs.size(); ++i) {
      const auto& ref = neuron.inputs[i];
      out << "  " << (ref.is_feature() ? "x" : "z") << ref.index << " -> z" << t
          << " [label=\"" << fixed4(neuron.weights[i + 1]) << "\"];\n";
    }
  }
  out << "}\n";
  return out.str();
}

}  // namespace sonn
