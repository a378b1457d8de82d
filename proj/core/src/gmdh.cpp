#include "sonn/gmdh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <sstream>

#include "sonn/errors.hpp"
#include "sonn/random.hpp"

namespace sonn {

std::size_t weight_count(PolyKind kind) {
  switch (kind) {
    case PolyKind::Single: return 2;
    case PolyKind::Linear: return 3;
    case PolyKind::Bilinear: return 4;
  }
  return 0;
}

void SupportingNeuron::validate() const {
  if (weights.size() != weight_count(kind)) {
    throw std::invalid_argument("supporting neuron: weight count does not match kind");
  }
}

bool PolyNetwork::empty() const { return neuron_count() == 0; }

std::size_t PolyNetwork::neuron_count() const {
  std::size_t n = 0;
  for (const auto& layer : layers) n += layer.size();
  return n;
}

const SupportingNeuron& PolyNetwork::at(NodeRef ref) const {
  if (ref.is_feature()) throw std::invalid_argument("PolyNetwork::at: reference is a feature");
  return layers.at(static_cast<std::size_t>(ref.layer - 1)).at(static_cast<std::size_t>(ref.index));
}

std::vector<int> PolyNetwork::referenced_features() const {
  std::vector<int> out;
  auto note = [&](NodeRef ref) {
    if (ref.is_feature() && std::find(out.begin(), out.end(), ref.index) == out.end()) {
      out.push_back(ref.index);
    }
  };
  for (const auto& layer : layers) {
    for (const auto& neuron : layer) {
      note(neuron.in1);
      if (neuron.kind != PolyKind::Single) note(neuron.in2);
    }
  }
  return out;
}

void PolyNetwork::validate() const {
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const int layer = static_cast<int>(l) + 1;
    for (const auto& neuron : layers[l]) {
      neuron.validate();
      auto check = [&](NodeRef ref) {
        if (ref.layer < 0 || ref.layer >= layer) {
          throw std::invalid_argument("poly network: neuron reads a layer that is not earlier");
        }
        if (!ref.is_feature()) at(ref);
      };
      check(neuron.in1);
      if (neuron.kind != PolyKind::Single) check(neuron.in2);
    }
  }
  if (!empty()) at(output);
}

std::size_t count_candidates(std::size_t m) {
  if (m < 2) throw std::invalid_argument("count_candidates: need m >= 2");
  return m * (m - 1) / 2;
}

double eval_supporting_neuron(const SupportingNeuron& neuron, double v1, double v2) {
  const auto& w = neuron.weights;
  switch (neuron.kind) {
    case PolyKind::Single: return w[0] + w[1] * v1;
    case PolyKind::Linear: return w[0] + w[1] * v1 + w[2] * v2;
    case PolyKind::Bilinear: return w[0] + w[1] * v1 + w[2] * v2 + w[3] * v1 * v2;
  }
  return 0.0;
}

namespace {

Eigen::MatrixXd basis(PolyKind kind, const Eigen::VectorXd& v1, const Eigen::VectorXd& v2) {
  Eigen::MatrixXd design(v1.size(), static_cast<Eigen::Index>(weight_count(kind)));
  design.col(0).setOnes();
  design.col(1) = v1;
  if (kind != PolyKind::Single) design.col(2) = v2;
  if (kind == PolyKind::Bilinear) design.col(3) = v1.cwiseProduct(v2);
  return design;
}

std::vector<double> as_vector(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

double accuracy_of(const Eigen::VectorXd& outputs, const std::vector<int>& labels) {
  std::size_t right = 0;
  for (Eigen::Index k = 0; k < outputs.size(); ++k) {
    right += (outputs(k) >= 0.5 ? 1 : 0) == labels[static_cast<std::size_t>(k)];
  }
  return static_cast<double>(right) / static_cast<double>(labels.size());
}

void check_inputs(const Dataset& train, const Dataset& val) {
  if (train.cols() < 2) throw DataError("gmdh: fewer than 2 usable inputs");
  if (val.rows() == 0) throw DataError("gmdh: empty validation set");
  if (val.cols() != train.cols()) throw DataError("gmdh: train/validation column mismatch");
  if (train.class_count() != 2) throw DataError("gmdh: binary classification only");
}

// A fitted candidate together with its outputs on both data subsets.
struct Fitted {
  SupportingNeuron neuron;
  Eigen::VectorXd out_a;
  Eigen::VectorXd out_b;
};

Fitted fit_candidate(PolyKind kind, NodeRef in1, NodeRef in2, const Eigen::VectorXd& a1,
                     const Eigen::VectorXd& a2, const Eigen::VectorXd& b1,
                     const Eigen::VectorXd& b2, const std::vector<double>& targets,
                     FitConfig cfg) {
  const Eigen::MatrixXd design_a = basis(kind, a1, a2);
  const Eigen::VectorXd w = fit_linear(design_a, targets, cfg);
  Fitted f;
  f.neuron = {kind, as_vector(w), in1, in2};
  f.out_a = design_a * w;
  f.out_b = basis(kind, b1, b2) * w;
  return f;
}

}  // namespace

PolyNetwork train_gmdh_layered(const Dataset& train, const Dataset& val, const GmdhConfig& cfg,
                               GmdhTrace* trace, bool prune_unused) {
  check_inputs(train, val);
  if (cfg.kind == PolyKind::Single) throw std::invalid_argument("gmdh: layered growth needs two-input neurons");
  if (cfg.max_layers < 1) throw std::invalid_argument("gmdh: max_layers must be >= 1");
  const auto targets_a = train.binary_targets();
  const auto targets_b = val.binary_targets();
  const std::size_t m = train.cols();

  int keep = 0;
  if (cfg.survivors) {
    keep = *cfg.survivors;
  } else {
    keep = static_cast<int>(std::lround(0.4 * static_cast<double>(count_candidates(m))));
    keep = std::clamp(keep, 1, std::max(1, cfg.survivor_cap));
  }
  if (keep < 1) throw std::invalid_argument("gmdh: survivor count F must be >= 1");

  PolyNetwork net;
  net.feature_names = train.feature_names;

  std::vector<NodeRef> inputs;
  std::vector<Eigen::VectorXd> in_a;
  std::vector<Eigen::VectorXd> in_b;
  for (std::size_t j = 0; j < m; ++j) {
    inputs.push_back(NodeRef::feature(static_cast<int>(j)));
    in_a.emplace_back(train.features.col(static_cast<Eigen::Index>(j)));
    in_b.emplace_back(val.features.col(static_cast<Eigen::Index>(j)));
  }

  for (int layer = 1; layer <= cfg.max_layers && inputs.size() >= 2; ++layer) {
    std::vector<Fitted> candidates;
    std::vector<double> scores;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
      for (std::size_t j = i + 1; j < inputs.size(); ++j) {
        FitConfig fc = cfg.fit;
        fc.seed = mix_seed(cfg.seed, static_cast<std::uint64_t>(layer), candidates.size());
        candidates.push_back(fit_candidate(cfg.kind, inputs[i], inputs[j], in_a[i], in_a[j],
                                           in_b[i], in_b[j], targets_a, fc));
        const auto& out = candidates.back().out_b;
        scores.push_back(exterior_criterion(std::span<const double>(out.data(), static_cast<std::size_t>(out.size())),
                                            targets_b).value);
      }
    }
    std::vector<std::size_t> order(candidates.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
    order.resize(std::min(order.size(), static_cast<std::size_t>(keep)));
    const double best = scores[order.front()];
    if (trace) {
      trace->candidate_scores.push_back(scores);
      trace->survivors.push_back(order);
    }
    if (!net.layer_scores.empty() && !(best < net.layer_scores.back())) {
      net.rejected_layer_score = best;
      break;
    }

    net.layer_scores.push_back(best);
    net.layers.emplace_back();
    inputs.clear();
    in_a.clear();
    in_b.clear();
    for (const std::size_t idx : order) {
      inputs.push_back(NodeRef::neuron(layer, static_cast<int>(net.layers.back().size())));
      net.layers.back().push_back(candidates[idx].neuron);
      in_a.push_back(std::move(candidates[idx].out_a));
      in_b.push_back(std::move(candidates[idx].out_b));
    }
  }
  net.output = NodeRef::neuron(static_cast<int>(net.layers.size()), 0);
  return prune_unused ? prune(net) : net;
}

PolyNetwork train_gmdh_roulette(const Dataset& train, const Dataset& val, const GmdhConfig& cfg,
                                GmdhTrace* trace) {
  check_inputs(train, val);
  if (cfg.attempts < 0) throw std::invalid_argument("gmdh: attempts must be >= 0");
  if (cfg.kind == PolyKind::Single) throw std::invalid_argument("gmdh: roulette growth needs two-input neurons");
  const auto targets_a = train.binary_targets();
  const std::size_t m = train.cols();

  struct Member {
    NodeRef ref;
    double accuracy;
    Eigen::VectorXd out_a;
    Eigen::VectorXd out_b;
  };
  std::vector<Member> pool;
  std::vector<SupportingNeuron> singles;
  for (std::size_t j = 0; j < m; ++j) {
    const Eigen::VectorXd a = train.features.col(static_cast<Eigen::Index>(j));
    const Eigen::VectorXd b = val.features.col(static_cast<Eigen::Index>(j));
    FitConfig fc = cfg.fit;
    fc.seed = mix_seed(cfg.seed, 0, j);
    Fitted f = fit_candidate(PolyKind::Single, NodeRef::feature(static_cast<int>(j)), NodeRef{},
                             a, a, b, b, targets_a, fc);
    pool.push_back({NodeRef::feature(static_cast<int>(j)), accuracy_of(f.out_b, val.labels), a, b});
    singles.push_back(std::move(f.neuron));
  }

  PolyNetwork net;
  net.feature_names = train.feature_names;
  Rng rng(mix_seed(cfg.seed, 0x5eed));

  auto spin = [&]() -> std::size_t {
    double total = 0.0;
    for (const auto& member : pool) total += member.accuracy;
    if (!(total > 0.0)) return rng.index(pool.size());
    const double target = rng.uniform() * total;
    double cumulative = 0.0;
    for (std::size_t i = 0; i < pool.size(); ++i) {
      cumulative += pool[i].accuracy;
      if (target < cumulative) return i;
    }
    return pool.size() - 1;
  };
  auto best_accuracy = [&] {
    double best = 0.0;
    for (const auto& member : pool) best = std::max(best, member.accuracy);
    return best;
  };

  for (int attempt = 0; attempt < cfg.attempts; ++attempt) {
    const std::size_t a = spin();
    std::size_t b = spin();
    for (int redraw = 0; b == a && redraw < 10; ++redraw) b = spin();
    if (a != b) {
      FitConfig fc = cfg.fit;
      fc.seed = mix_seed(cfg.seed, 1, static_cast<std::uint64_t>(attempt));
      Fitted f = fit_candidate(cfg.kind, pool[a].ref, pool[b].ref, pool[a].out_a, pool[b].out_a,
                               pool[a].out_b, pool[b].out_b, targets_a, fc);
      const double accuracy = accuracy_of(f.out_b, val.labels);
      if (accuracy > std::max(pool[a].accuracy, pool[b].accuracy)) {
        const int layer = 1 + std::max(pool[a].ref.layer, pool[b].ref.layer);
        if (net.layers.size() < static_cast<std::size_t>(layer)) net.layers.resize(static_cast<std::size_t>(layer));
        auto& slot = net.layers[static_cast<std::size_t>(layer - 1)];
        const NodeRef ref = NodeRef::neuron(layer, static_cast<int>(slot.size()));
        slot.push_back(std::move(f.neuron));
        pool.push_back({ref, accuracy, std::move(f.out_a), std::move(f.out_b)});
        if (trace) ++trace->accepted;
      }
    }
    if (trace) trace->best_accuracy.push_back(best_accuracy());
  }

  std::size_t best = 0;
  for (std::size_t i = 1; i < pool.size(); ++i) {
    if (pool[i].accuracy > pool[best].accuracy) best = i;
  }
  if (pool[best].ref.is_feature()) {
    if (net.layers.empty()) net.layers.emplace_back();
    net.output = NodeRef::neuron(1, static_cast<int>(net.layers[0].size()));
    net.layers[0].push_back(singles[static_cast<std::size_t>(pool[best].ref.index)]);
  } else {
    net.output = pool[best].ref;
  }
  return prune(net);
}

PolyNetwork prune(const PolyNetwork& net) {
  if (net.empty()) return net;
  std::vector<std::vector<bool>> needed;
  for (const auto& layer : net.layers) needed.emplace_back(layer.size(), false);
  std::vector<NodeRef> stack{net.output};
  while (!stack.empty()) {
    const NodeRef ref = stack.back();
    stack.pop_back();
    if (ref.is_feature()) continue;
    auto flag = needed[static_cast<std::size_t>(ref.layer - 1)][static_cast<std::size_t>(ref.index)];
    if (flag) continue;
    needed[static_cast<std::size_t>(ref.layer - 1)][static_cast<std::size_t>(ref.index)] = true;
    const auto& neuron = net.at(ref);
    stack.push_back(neuron.in1);
    if (neuron.kind != PolyKind::Single) stack.push_back(neuron.in2);
  }

  PolyNetwork out;
  out.feature_names = net.feature_names;
  out.rejected_layer_score = net.rejected_layer_score;
  std::map<NodeRef, NodeRef> remap;
  auto translate = [&](NodeRef ref) { return ref.is_feature() ? ref : remap.at(ref); };
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    std::vector<SupportingNeuron> kept;
    const int new_layer = static_cast<int>(out.layers.size()) + 1;
    for (std::size_t i = 0; i < net.layers[l].size(); ++i) {
      if (!needed[l][i]) continue;
      SupportingNeuron neuron = net.layers[l][i];
      neuron.in1 = translate(neuron.in1);
      if (neuron.kind != PolyKind::Single) neuron.in2 = translate(neuron.in2);
      remap[NodeRef::neuron(static_cast<int>(l) + 1, static_cast<int>(i))] =
          NodeRef::neuron(new_layer, static_cast<int>(kept.size()));
      kept.push_back(std::move(neuron));
    }
    if (!kept.empty()) out.layers.push_back(std::move(kept));
  }
  out.output = remap.at(net.output);
  if (out.layers.size() == net.layers.size()) out.layer_scores = net.layer_scores;
  return out;
}

double poly_raw(const PolyNetwork& net, std::span<const double> x) {
  if (net.empty()) throw std::invalid_argument("predict_poly: untrained model");
  std::vector<std::vector<double>> values(net.layers.size());
  auto value = [&](NodeRef ref) -> double {
    if (ref.is_feature()) {
      if (ref.index < 0 || static_cast<std::size_t>(ref.index) >= x.size()) {
        throw DataError("predict_poly: missing feature column " + std::to_string(ref.index));
      }
      return x[static_cast<std::size_t>(ref.index)];
    }
    return values[static_cast<std::size_t>(ref.layer - 1)][static_cast<std::size_t>(ref.index)];
  };
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    for (const auto& neuron : net.layers[l]) {
      const double v1 = value(neuron.in1);
      const double v2 = neuron.kind == PolyKind::Single ? 0.0 : value(neuron.in2);
      values[l].push_back(eval_supporting_neuron(neuron, v1, v2));
    }
  }
  return value(net.output);
}

Prediction predict_poly(const PolyNetwork& net, std::span<const double> x) {
  const double raw = poly_raw(net, x);
  return {raw >= 0.5 ? 1 : 0, raw};
}

namespace {

std::string node_name(const PolyNetwork& net, NodeRef ref) {
  if (ref.is_feature()) return net.feature_names.at(static_cast<std::size_t>(ref.index));
  return "y_" + std::to_string(ref.index + 1) + "^(" + std::to_string(ref.layer) + ")";
}

std::string coefficient(double w) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", std::abs(w));
  return std::string(w < 0.0 ? " - " : " + ") + buf;
}

std::string fixed4(double w) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", w);
  return buf;
}

}  // namespace

std::string to_polynomial_text(const PolyNetwork& net) {
  std::ostringstream out;
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    for (std::size_t i = 0; i < net.layers[l].size(); ++i) {
      const auto& neuron = net.layers[l][i];
      const NodeRef self = NodeRef::neuron(static_cast<int>(l) + 1, static_cast<int>(i));
      const std::string v1 = node_name(net, neuron.in1);
      out << node_name(net, self) << " = " << fixed4(neuron.weights[0])
          << coefficient(neuron.weights[1]) << '*' << v1;
      if (neuron.kind != PolyKind::Single) {
        const std::string v2 = node_name(net, neuron.in2);
        out << coefficient(neuron.weights[2]) << '*' << v2;
        if (neuron.kind == PolyKind::Bilinear) {
          out << coefficient(neuron.weights[3]) << '*' << v1 << '*' << v2;
        }
      }
      if (self == net.output) out << "   (output)";
      out << '\n';
    }
  }
  return out.str();
}

std::string poly_to_dot(const PolyNetwork& net) {
  std::ostringstream out;
  auto id = [](NodeRef ref) {
    return ref.is_feature() ? "x" + std::to_string(ref.index)
                            : "n" + std::to_string(ref.layer) + "_" + std::to_string(ref.index);
  };
  out << "digraph gmdh {\n  rankdir=LR;\n";
  for (const int f : net.referenced_features()) {
    out << "  x" << f << " [shape=ellipse, label=\""
        << net.feature_names.at(static_cast<std::size_t>(f)) << "\"];\n";
  }
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    for (std::size_t i = 0; i < net.layers[l].size(); ++i) {
      const NodeRef self = NodeRef::neuron(static_cast<int>(l) + 1, static_cast<int>(i));
      out << "  " << id(self) << " [shape=box, style=filled, fillcolor=gray80, label=\""
          << node_name(net, self) << "\"" << (self == net.output ? ", peripheries=2" : "")
          << "];\n";
    }
  }
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    for (std::size_t i = 0; i < net.layers[l].size(); ++i) {
      const NodeRef self = NodeRef::neuron(static_cast<int>(l) + 1, static_cast<int>(i));
      const auto& neuron = net.layers[l][i];
      out << "  " << id(neuron.in1) << " -> " << id(self) << ";\n";
      if (neuron.kind != PolyKind::Single) out << "  " << id(neuron.in2) << " -> " << id(self) << ";\n";
    }
  }
  out << "}\n";
  return out.str();
}

}  // namespace sonn
