#include "sonn/model_io.hpp"

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "sonn/errors.hpp"

namespace sonn {

using nlohmann::json;

namespace {

constexpr std::pair<Method, const char*> kTags[] = {
    {Method::Ecnn, "ecnn"},         {Method::GmdhLayered, "gmdh-layered"},
    {Method::GmdhRoulette, "gmdh-roulette"}, {Method::Lm, "lm"},
    {Method::PairwiseDt, "pairwise-dt"}, {Method::RuleTree, "ruletree"},
    {Method::Fnn, "fnn"},
};

std::size_t expected_payload(Method method) {
  switch (method) {
    case Method::Ecnn: return 0;
    case Method::GmdhLayered:
    case Method::GmdhRoulette: return 1;
    case Method::Lm: return 2;
    case Method::PairwiseDt: return 3;
    case Method::RuleTree: return 4;
    case Method::Fnn: return 5;
  }
  return 0;
}

json vec(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Eigen::VectorXd to_vec(const json& j) {
  const auto values = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

json mat(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) rows.push_back(vec(m.row(r).transpose()));
  return rows;
}

Eigen::MatrixXd to_mat(const json& j) {
  const auto rows = j.get<std::vector<std::vector<double>>>();
  if (rows.empty()) return {};
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows[0].size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != rows[0].size()) throw DataError("model file: ragged matrix");
    for (std::size_t c = 0; c < rows[r].size(); ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    }
  }
  return m;
}

json node_ref(NodeRef ref) { return json::array({ref.layer, ref.index}); }

NodeRef to_node_ref(const json& j) { return {j.at(0).get<int>(), j.at(1).get<int>()}; }

const char* kind_tag(PolyKind kind) {
  switch (kind) {
    case PolyKind::Single: return "single";
    case PolyKind::Linear: return "linear";
    case PolyKind::Bilinear: return "bilinear";
  }
  return "";
}

PolyKind to_kind(const std::string& tag) {
  if (tag == "single") return PolyKind::Single;
  if (tag == "linear") return PolyKind::Linear;
  if (tag == "bilinear") return PolyKind::Bilinear;
  throw DataError("model file: unknown polynomial kind '" + tag + "'");
}

struct PayloadWriter {
  json operator()(const CascadeNetwork& net) const {
    json neurons = json::array();
    for (const auto& neuron : net.neurons) {
      json inputs = json::array();
      for (const auto& ref : neuron.inputs) {
        inputs.push_back({{"kind", ref.is_feature() ? "feature" : "neuron"}, {"index", ref.index}});
      }
      neurons.push_back({{"weights", neuron.weights}, {"inputs", inputs}});
    }
    return {{"anchor_feature", net.anchor_feature},
            {"decision_threshold", net.decision_threshold},
            {"neurons", neurons},
            {"accepted_scores", net.accepted_scores},
            {"feature_order", net.feature_order},
            {"feature_errors", net.feature_errors}};
  }
  json operator()(const PolyNetwork& net) const {
    json layers = json::array();
    for (const auto& layer : net.layers) {
      json neurons = json::array();
      for (const auto& n : layer) {
        json entry = {{"kind", kind_tag(n.kind)}, {"weights", n.weights}, {"in1", node_ref(n.in1)}};
        if (n.kind != PolyKind::Single) entry["in2"] = node_ref(n.in2);
        neurons.push_back(std::move(entry));
      }
      layers.push_back(std::move(neurons));
    }
    return {{"layers", layers},
            {"output", node_ref(net.output)},
            {"layer_scores", net.layer_scores},
            {"rejected_layer_score", net.rejected_layer_score ? json(*net.rejected_layer_score) : json()}};
  }
  json operator()(const LinearMachine& lm) const {
    json weights = json::array();
    for (const auto& w : lm.class_weights) weights.push_back(vec(w));
    return {{"class_weights", weights}};
  }
  json operator()(const PairwiseTree& tree) const {
    json tlus = json::array();
    for (const auto& [key, test] : tree.tlus) {
      tlus.push_back({{"i", key.first},
                      {"j", key.second},
                      {"features", test.features},
                      {"weights", test.weights},
                      {"accuracy", test.accuracy}});
    }
    return {{"class_count", tree.class_count}, {"tlus", tlus}};
  }
  json operator()(const RuleTree& tree) const {
    json nodes = json::array();
    for (const auto& n : tree.nodes) {
      nodes.push_back({{"feature", n.feature},
                       {"threshold", n.threshold},
                       {"high_is_one", n.high_is_one},
                       {"low", n.low},
                       {"high", n.high},
                       {"low_class", n.low_class},
                       {"high_class", n.high_class}});
    }
    return {{"nodes", nodes}};
  }
  json operator()(const FnnPayload& fnn) const {
    json out = {{"hidden", mat(fnn.model.hidden)}, {"output", mat(fnn.model.output)}};
    if (fnn.pca) {
      out["pca"] = {{"mean", vec(fnn.pca->mean)},
                    {"components", mat(fnn.pca->components.transpose())},
                    {"explained", fnn.pca->explained}};
    } else {
      out["pca"] = nullptr;
    }
    return out;
  }
};

Payload read_payload(Method method, const json& j, const ModelFile& model) {
  switch (method) {
    case Method::Ecnn: {
      CascadeNetwork net;
      net.anchor_feature = j.at("anchor_feature").get<int>();
      net.decision_threshold = j.at("decision_threshold").get<double>();
      for (const auto& n : j.at("neurons")) {
        SigmoidNeuron neuron;
        neuron.weights = n.at("weights").get<std::vector<double>>();
        for (const auto& in : n.at("inputs")) {
          const auto kind = in.at("kind").get<std::string>();
          const int index = in.at("index").get<int>();
          if (kind == "feature") neuron.inputs.push_back(InputRef::feature(index));
          else if (kind == "neuron") neuron.inputs.push_back(InputRef::neuron(index));
          else throw DataError("model file: unknown input kind '" + kind + "'");
        }
        net.neurons.push_back(std::move(neuron));
      }
      net.accepted_scores = j.at("accepted_scores").get<std::vector<double>>();
      net.feature_order = j.at("feature_order").get<std::vector<int>>();
      net.feature_errors = j.at("feature_errors").get<std::vector<double>>();
      net.feature_names = model.feature_names;
      return net;
    }
    case Method::GmdhLayered:
    case Method::GmdhRoulette: {
      PolyNetwork net;
      for (const auto& layer : j.at("layers")) {
        std::vector<SupportingNeuron> neurons;
        for (const auto& n : layer) {
          SupportingNeuron neuron;
          neuron.kind = to_kind(n.at("kind").get<std::string>());
          neuron.weights = n.at("weights").get<std::vector<double>>();
          neuron.in1 = to_node_ref(n.at("in1"));
          if (neuron.kind != PolyKind::Single) neuron.in2 = to_node_ref(n.at("in2"));
          neurons.push_back(std::move(neuron));
        }
        net.layers.push_back(std::move(neurons));
      }
      net.output = to_node_ref(j.at("output"));
      net.layer_scores = j.at("layer_scores").get<std::vector<double>>();
      if (!j.at("rejected_layer_score").is_null()) {
        net.rejected_layer_score = j.at("rejected_layer_score").get<double>();
      }
      net.feature_names = model.feature_names;
      return net;
    }
    case Method::Lm: {
      LinearMachine lm;
      for (const auto& w : j.at("class_weights")) lm.class_weights.push_back(to_vec(w));
      return lm;
    }
    case Method::PairwiseDt: {
      PairwiseTree tree;
      tree.class_count = j.at("class_count").get<int>();
      for (const auto& t : j.at("tlus")) {
        LinearTest test{t.at("features").get<std::vector<int>>(), t.at("weights").get<std::vector<double>>(),
                        t.at("accuracy").get<double>()};
        tree.tlus.emplace(std::make_pair(t.at("i").get<int>(), t.at("j").get<int>()), std::move(test));
      }
      return tree;
    }
    case Method::RuleTree: {
      RuleTree tree;
      for (const auto& n : j.at("nodes")) {
        tree.nodes.push_back({n.at("feature").get<int>(), n.at("threshold").get<double>(),
                              n.at("high_is_one").get<bool>(), n.at("low").get<int>(),
                              n.at("high").get<int>(), n.at("low_class").get<int>(),
                              n.at("high_class").get<int>()});
      }
      tree.feature_names = model.feature_names;
      tree.class_names = model.class_names;
      return tree;
    }
    case Method::Fnn: {
      FnnPayload fnn;
      fnn.model.hidden = to_mat(j.at("hidden"));
      fnn.model.output = to_mat(j.at("output"));
      if (!j.at("pca").is_null()) {
        const auto& p = j.at("pca");
        auto& pca = fnn.pca.emplace();
        pca.mean = to_vec(p.at("mean"));
        pca.components = to_mat(p.at("components")).transpose();
        pca.explained = p.at("explained").get<std::vector<double>>();
      }
      return fnn;
    }
  }
  throw DataError("model file: unsupported method");
}

}  // namespace

std::string method_tag(Method method) {
  for (const auto& [m, tag] : kTags) {
    if (m == method) return tag;
  }
  throw std::invalid_argument("unknown method");
}

Method parse_method(std::string_view tag) {
  for (const auto& [m, name] : kTags) {
    if (tag == name) return m;
  }
  throw std::invalid_argument("unknown method '" + std::string(tag) +
                              "' (expected ecnn, gmdh-layered, gmdh-roulette, lm, pairwise-dt, ruletree or fnn)");
}

void ModelFile::validate() const {
  if (format_version != kFormatVersion) {
    throw DataError("model file: unsupported format_version " + std::to_string(format_version));
  }
  if (payload.index() != expected_payload(method)) {
    throw DataError("model file: payload does not match method " + method_tag(method));
  }
  if (norm.mean.size() != feature_names.size() || norm.sd.size() != feature_names.size()) {
    throw DataError("model file: normalization does not match the feature count");
  }
  if (class_names.size() < 2) throw DataError("model file: need at least 2 class names");
  try {
    std::visit(
        [&](const auto& p) {
          using T = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<T, CascadeNetwork>) {
            if (p.neurons.empty()) throw std::invalid_argument("empty cascade");
            for (const auto& n : p.neurons) n.validate();
          } else if constexpr (std::is_same_v<T, FnnPayload>) {
            p.model.validate();
            const std::size_t in = p.pca ? p.pca->retained() : feature_names.size();
            if (p.model.inputs() != in) throw std::invalid_argument("fnn input count mismatch");
          } else {
            p.validate();
          }
        },
        payload);
  } catch (const std::invalid_argument& e) {
    throw DataError(std::string("model file: invalid payload: ") + e.what());
  }
}

json model_to_json(const ModelFile& model) {
  model.validate();
  return {{"format_version", model.format_version},
          {"method", method_tag(model.method)},
          {"feature_names", model.feature_names},
          {"class_names", model.class_names},
          {"label_column", model.label_column},
          {"norm", {{"mean", model.norm.mean}, {"sd", model.norm.sd}}},
          {"payload", std::visit(PayloadWriter{}, model.payload)},
          {"provenance",
           {{"seed", model.provenance.seed},
            {"config", model.provenance.config},
            {"dataset_fingerprint", model.provenance.dataset_fingerprint}}}};
}

ModelFile model_from_json(const json& doc) {
  ModelFile model;
  try {
    model.format_version = doc.at("format_version").get<int>();
    if (model.format_version != kFormatVersion) {
      throw DataError("model file: unsupported format_version " + std::to_string(model.format_version));
    }
    try {
      model.method = parse_method(doc.at("method").get<std::string>());
    } catch (const std::invalid_argument& e) {
      throw DataError(std::string("model file: ") + e.what());
    }
    model.feature_names = doc.at("feature_names").get<std::vector<std::string>>();
    model.class_names = doc.at("class_names").get<std::vector<std::string>>();
    model.label_column = doc.at("label_column").get<std::string>();
    model.norm.mean = doc.at("norm").at("mean").get<std::vector<double>>();
    model.norm.sd = doc.at("norm").at("sd").get<std::vector<double>>();
    model.payload = read_payload(model.method, doc.at("payload"), model);
    const auto& prov = doc.at("provenance");
    model.provenance.seed = prov.at("seed").get<std::uint64_t>();
    model.provenance.config = prov.at("config");
    model.provenance.dataset_fingerprint = prov.at("dataset_fingerprint").get<std::string>();
  } catch (const json::exception& e) {
    throw DataError(std::string("model file: ") + e.what());
  }
  model.validate();
  return model;
}

std::string serialize_model(const ModelFile& model) { return model_to_json(model).dump(1) + "\n"; }

ModelFile deserialize_model(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw DataError(std::string("model file: ") + e.what());
  }
  return model_from_json(doc);
}

void save_model(const ModelFile& model, const std::filesystem::path& path) {
  const std::string text = serialize_model(model);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write model file " + path.string());
  out << text;
  if (!out) throw DataError("failed writing model file " + path.string());
}

ModelFile load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open model file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return deserialize_model(buf.str());
}

Prediction predict_normalized(const ModelFile& model, std::span<const double> x) {
  if (x.size() != model.feature_names.size()) {
    throw DataError("predict: row has " + std::to_string(x.size()) + " values, model expects " +
                    std::to_string(model.feature_names.size()));
  }
  return std::visit(
      [&](const auto& p) -> Prediction {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, CascadeNetwork>) {
          return predict_cascade(p, x);
        } else if constexpr (std::is_same_v<T, PolyNetwork>) {
          return predict_poly(p, x);
        } else if constexpr (std::is_same_v<T, LinearMachine>) {
          return predict_lm(p, x);
        } else if constexpr (std::is_same_v<T, PairwiseTree>) {
          return predict_pairwise(p, x);
        } else if constexpr (std::is_same_v<T, RuleTree>) {
          const int label = classify_rule(p, x);
          return {label, static_cast<double>(label)};
        } else {
          if (!p.pca) return predict_fnn(p.model, x);
          const Eigen::VectorXd z = p.pca->transform(x);
          return predict_fnn(p.model, std::span<const double>(z.data(), static_cast<std::size_t>(z.size())));
        }
      },
      model.payload);
}

Prediction predict(const ModelFile& model, std::span<const double> raw) {
  std::vector<double> x(raw.begin(), raw.end());
  if (x.size() != model.norm.mean.size()) {
    throw DataError("predict: row has " + std::to_string(x.size()) + " values, model expects " +
                    std::to_string(model.norm.mean.size()));
  }
  model.norm.apply_row(x);
  return predict_normalized(model, x);
}

std::vector<int> predict_all(const ModelFile& model, const Dataset& raw) {
  std::vector<int> out;
  out.reserve(raw.rows());
  std::vector<double> row(raw.cols());
  for (std::size_t r = 0; r < raw.rows(); ++r) {
    for (std::size_t c = 0; c < raw.cols(); ++c) {
      row[c] = raw.features(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
    }
    out.push_back(predict(model, row).label);
  }
  return out;
}

std::vector<int> selected_features(const ModelFile& model) {
  std::set<int> used;
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, CascadeNetwork>) {
          for (const int f : p.selected_features()) used.insert(f);
        } else if constexpr (std::is_same_v<T, PolyNetwork>) {
          for (const int f : p.referenced_features()) used.insert(f);
        } else if constexpr (std::is_same_v<T, PairwiseTree>) {
          for (const auto& [key, test] : p.tlus) used.insert(test.features.begin(), test.features.end());
        } else if constexpr (std::is_same_v<T, RuleTree>) {
          for (const auto& n : p.nodes) used.insert(n.feature);
        } else {
          for (int f = 0; f < static_cast<int>(model.feature_names.size()); ++f) used.insert(f);
        }
      },
      model.payload);
  return {used.begin(), used.end()};
}

namespace {

std::string fixed4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

std::string signed4(double v) {
  return std::string(v < 0.0 ? " - " : " + ") + fixed4(std::abs(v));
}

// w0 + w1*name1 + ... over the given columns.
std::string affine(std::span<const double> w, const std::vector<std::string>& names,
                   std::span<const int> columns) {
  std::string out = fixed4(w[0]);
  for (std::size_t i = 0; i < columns.size(); ++i) {
    out += signed4(w[i + 1]) + "*" + names.at(static_cast<std::size_t>(columns[i]));
  }
  return out;
}

std::vector<int> all_columns(std::size_t m) {
  std::vector<int> out(m);
  for (std::size_t i = 0; i < m; ++i) out[i] = static_cast<int>(i);
  return out;
}

std::string lm_text(const ModelFile& model, const LinearMachine& lm) {
  std::ostringstream out;
  const auto columns = all_columns(model.feature_names.size());
  for (std::size_t c = 0; c < lm.class_weights.size(); ++c) {
    const auto& w = lm.class_weights[c];
    out << "g_" << model.class_names[c] << " = "
        << affine({w.data(), static_cast<std::size_t>(w.size())}, model.feature_names, columns) << '\n';
  }
  out << "class = argmax g\n";
  return out.str();
}

std::string pairwise_text(const ModelFile& model, const PairwiseTree& tree) {
  std::ostringstream out;
  for (const auto& [key, test] : tree.tlus) {
    out << "f_" << model.class_names[static_cast<std::size_t>(key.first)] << '/'
        << model.class_names[static_cast<std::size_t>(key.second)] << " = sign("
        << affine(test.weights, model.feature_names, test.features) << ")  accuracy "
        << fixed4(test.accuracy) << '\n';
  }
  out << "g_i = sum_{k>i} f_i/k - sum_{k<i} f_k/i; class = argmax g\n";
  return out.str();
}

std::string fnn_text(const ModelFile& model, const FnnPayload& fnn) {
  std::ostringstream out;
  std::vector<std::string> inputs = model.feature_names;
  if (fnn.pca) {
    inputs.clear();
    out << "pca: " << fnn.pca->retained() << " components, explained";
    for (const double e : fnn.pca->explained) out << ' ' << fixed4(e);
    out << '\n';
    for (std::size_t k = 0; k < fnn.pca->retained(); ++k) inputs.push_back("pc" + std::to_string(k + 1));
  }
  const auto in_cols = all_columns(inputs.size());
  for (Eigen::Index h = 0; h < fnn.model.hidden.rows(); ++h) {
    const Eigen::VectorXd w = fnn.model.hidden.row(h).transpose();
    out << "h" << h + 1 << " = sigmoid(" << affine({w.data(), static_cast<std::size_t>(w.size())}, inputs, in_cols)
        << ")\n";
  }
  std::vector<std::string> hidden;
  for (Eigen::Index h = 0; h < fnn.model.hidden.rows(); ++h) hidden.push_back("h" + std::to_string(h + 1));
  const auto h_cols = all_columns(hidden.size());
  for (Eigen::Index o = 0; o < fnn.model.output.rows(); ++o) {
    const Eigen::VectorXd w = fnn.model.output.row(o).transpose();
    out << "y" << o + 1 << " = sigmoid(" << affine({w.data(), static_cast<std::size_t>(w.size())}, hidden, h_cols)
        << ")\n";
  }
  return out.str();
}

std::string lm_dot(const ModelFile& model, const LinearMachine& lm) {
  std::ostringstream out;
  out << "digraph lm {\n  rankdir=LR;\n";
  for (std::size_t f = 0; f < model.feature_names.size(); ++f) {
    out << "  x" << f << " [shape=ellipse, label=\"" << model.feature_names[f] << "\"];\n";
  }
  for (std::size_t c = 0; c < lm.class_weights.size(); ++c) {
    out << "  g" << c << " [shape=box, style=filled, fillcolor=gray80, label=\"g_" << model.class_names[c]
        << "\\nbias " << fixed4(lm.class_weights[c](0)) << "\"];\n";
  }
  for (std::size_t c = 0; c < lm.class_weights.size(); ++c) {
    for (std::size_t f = 0; f < model.feature_names.size(); ++f) {
      out << "  x" << f << " -> g" << c << " [label=\""
          << fixed4(lm.class_weights[c](static_cast<Eigen::Index>(f) + 1)) << "\"];\n";
    }
  }
  out << "}\n";
  return out.str();
}

std::string pairwise_dot(const ModelFile& model, const PairwiseTree& tree) {
  std::ostringstream out;
  out << "digraph pairwise {\n  rankdir=LR;\n";
  for (const int f : selected_features(model)) {
    out << "  x" << f << " [shape=ellipse, label=\"" << model.feature_names[static_cast<std::size_t>(f)]
        << "\"];\n";
  }
  for (const auto& [key, test] : tree.tlus) {
    out << "  f" << key.first << '_' << key.second << " [shape=box, style=filled, fillcolor=gray80, label=\"f_"
        << model.class_names[static_cast<std::size_t>(key.first)] << '/'
        << model.class_names[static_cast<std::size_t>(key.second)] << "\"];\n";
  }
  for (int c = 0; c < tree.class_count; ++c) {
    out << "  c" << c << " [shape=doublecircle, label=\"" << model.class_names[static_cast<std::size_t>(c)]
        << "\"];\n";
  }
  for (const auto& [key, test] : tree.tlus) {
    for (std::size_t i = 0; i < test.features.size(); ++i) {
      out << "  x" << test.features[i] << " -> f" << key.first << '_' << key.second << " [label=\""
          << fixed4(test.weights[i + 1]) << "\"];\n";
    }
    out << "  f" << key.first << '_' << key.second << " -> c" << key.first << " [label=\"+1\"];\n";
    out << "  f" << key.first << '_' << key.second << " -> c" << key.second << " [label=\"-1\"];\n";
  }
  out << "}\n";
  return out.str();
}

}  // namespace

std::string export_text(const ModelFile& model) {
  return std::visit(
      [&](const auto& p) -> std::string {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, CascadeNetwork>) return describe_cascade(p);
        else if constexpr (std::is_same_v<T, PolyNetwork>) return to_polynomial_text(p);
        else if constexpr (std::is_same_v<T, LinearMachine>) return lm_text(model, p);
        else if constexpr (std::is_same_v<T, PairwiseTree>) return pairwise_text(model, p);
        else if constexpr (std::is_same_v<T, RuleTree>) return to_text(p);
        else return fnn_text(model, p);
      },
      model.payload);
}

std::string export_dot(const ModelFile& model) {
  return std::visit(
      [&](const auto& p) -> std::string {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, CascadeNetwork>) return cascade_to_dot(p);
        else if constexpr (std::is_same_v<T, PolyNetwork>) return poly_to_dot(p);
        else if constexpr (std::is_same_v<T, LinearMachine>) return lm_dot(model, p);
        else if constexpr (std::is_same_v<T, PairwiseTree>) return pairwise_dot(model, p);
        else if constexpr (std::is_same_v<T, RuleTree>) return rules_to_dot(p);
        else throw std::invalid_argument("export: fnn models have no dot form, use text");
      },
      model.payload);
}

std::string dataset_fingerprint(const Dataset& data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto bytes = [&](const void* p, std::size_t n) {
    const auto* b = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= b[i];
      h *= 0x100000001b3ULL;
    }
  };
  auto text = [&](const std::string& s) { bytes(s.data(), s.size() + 1); };
  for (const auto& name : data.feature_names) text(name);
  for (const auto& name : data.class_names) text(name);
  for (std::size_t r = 0; r < data.rows(); ++r) {
    for (std::size_t c = 0; c < data.cols(); ++c) {
      const double v = data.features(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
      bytes(&v, sizeof v);
    }
    const auto label = static_cast<std::int32_t>(data.labels[r]);
    bytes(&label, sizeof label);
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace sonn
