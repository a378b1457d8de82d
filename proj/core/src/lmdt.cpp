#include "sonn/lmdt.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "sonn/errors.hpp"
#include "sonn/random.hpp"

namespace sonn {

std::size_t LinearMachine::input_count() const {
  return class_weights.empty() ? 0 : static_cast<std::size_t>(class_weights.front().size()) - 1;
}

void LinearMachine::validate() const {
  if (class_weights.size() < 2) throw std::invalid_argument("linear machine: need r >= 2 classes");
  for (const auto& w : class_weights) {
    if (w.size() < 1 || w.size() != class_weights.front().size()) {
      throw std::invalid_argument("linear machine: weight vectors differ in length");
    }
  }
}

LinearMachine LinearMachine::zeros(int classes, std::size_t inputs) {
  LinearMachine lm;
  lm.class_weights.assign(static_cast<std::size_t>(classes),
                          Eigen::VectorXd::Zero(static_cast<Eigen::Index>(inputs) + 1));
  lm.validate();
  return lm;
}

namespace {

double augmented_dot(const Eigen::VectorXd& w, std::span<const double> x) {
  double g = w(0);
  for (std::size_t i = 0; i < x.size(); ++i) g += w(static_cast<Eigen::Index>(i) + 1) * x[i];
  return g;
}

void check_length(const LinearMachine& lm, std::span<const double> x) {
  if (x.size() != lm.input_count()) {
    throw std::invalid_argument("linear machine: input length " + std::to_string(x.size()) +
                                " does not match " + std::to_string(lm.input_count()));
  }
}

std::span<const double> row_of(const std::vector<double>& rows, std::size_t m, std::size_t r) {
  return {rows.data() + r * m, m};
}

std::vector<double> row_major(const Eigen::MatrixXd& x) {
  std::vector<double> out(static_cast<std::size_t>(x.size()));
  Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      out.data(), x.rows(), x.cols()) = x;
  return out;
}

}  // namespace

Eigen::VectorXd discriminants(const LinearMachine& lm, std::span<const double> x) {
  check_length(lm, x);
  Eigen::VectorXd g(lm.class_count());
  for (int j = 0; j < lm.class_count(); ++j) g(j) = augmented_dot(lm.class_weights[static_cast<std::size_t>(j)], x);
  return g;
}

int wta_classify(const LinearMachine& lm, std::span<const double> x) {
  const Eigen::VectorXd g = discriminants(lm, x);
  int best = 0;
  for (int j = 1; j < g.size(); ++j) {
    if (g(j) > g(best)) best = j;
  }
  return best;
}

double lm_accuracy(const LinearMachine& lm, const Eigen::MatrixXd& x, std::span<const int> labels) {
  if (x.rows() == 0) throw std::invalid_argument("lm_accuracy: empty data");
  const auto rows = row_major(x);
  const auto m = static_cast<std::size_t>(x.cols());
  std::size_t right = 0;
  for (std::size_t r = 0; r < labels.size(); ++r) right += wta_classify(lm, row_of(rows, m, r)) == labels[r];
  return static_cast<double>(right) / static_cast<double>(labels.size());
}

void error_correct(LinearMachine& lm, std::span<const double> x, int true_class, int predicted,
                   double c) {
  check_length(lm, x);
  if (true_class == predicted) throw std::invalid_argument("error_correct: true and predicted class coincide");
  auto& up = lm.class_weights.at(static_cast<std::size_t>(true_class));
  auto& down = lm.class_weights.at(static_cast<std::size_t>(predicted));
  up(0) += c;
  down(0) -= c;
  for (std::size_t i = 0; i < x.size(); ++i) {
    up(static_cast<Eigen::Index>(i) + 1) += c * x[i];
    down(static_cast<Eigen::Index>(i) + 1) -= c * x[i];
  }
}

void ThermalSchedule::validate() const {
  if (!(beta > 0.0)) throw std::invalid_argument("thermal schedule: beta must be > 0");
  if (!(epsilon > 0.1)) throw std::invalid_argument("thermal schedule: epsilon must be > 0.1");
  if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("thermal schedule: a and b must be > 0");
}

double thermal_correction(const ThermalSchedule& sched, const Eigen::VectorXd& w_j,
                          const Eigen::VectorXd& w_i, std::span<const double> x) {
  const Eigen::VectorXd diff = w_j - w_i;
  double xx = 1.0;
  for (const double v : x) xx += v * v;
  const double k = augmented_dot(diff, x) / (2.0 * xx) + sched.epsilon;
  return sched.beta / (sched.beta + k * k);
}

PocketState train_pocket_ratchet(LinearMachine lm, const Eigen::MatrixXd& x,
                                 std::span<const int> labels, const PocketConfig& cfg) {
  lm.validate();
  if (cfg.epochs < 0) throw std::invalid_argument("pocket: epochs must be >= 0");
  if (!(cfg.correction >= 0.0)) throw std::invalid_argument("pocket: correction must be >= 0");
  if (cfg.thermal) cfg.thermal->validate();
  if (x.rows() == 0) throw DataError("pocket: empty training set");
  if (static_cast<std::size_t>(x.rows()) != labels.size()) {
    throw std::invalid_argument("pocket: row and label counts differ");
  }
  if (static_cast<std::size_t>(x.cols()) != lm.input_count()) {
    throw std::invalid_argument("pocket: column count does not match the machine");
  }
  for (const int label : labels) {
    if (label < 0 || label >= lm.class_count()) throw DataError("pocket: label out of range");
  }

  const std::size_t n = labels.size();
  const auto m = static_cast<std::size_t>(x.cols());
  const auto rows = row_major(x);
  const int epochs = cfg.epochs > 0 ? cfg.epochs : static_cast<int>(n);
  auto accuracy = [&](const LinearMachine& w) {
    std::size_t right = 0;
    for (std::size_t r = 0; r < n; ++r) right += wta_classify(w, row_of(rows, m, r)) == labels[r];
    return static_cast<double>(right) / static_cast<double>(n);
  };
  auto magnitude = [&] {
    double s = 0.0;
    for (const auto& w : lm.class_weights) s += w.norm();
    return s;
  };

  PocketState st;
  st.pocket = lm;
  st.pocket_accuracy = accuracy(lm);
  std::optional<ThermalSchedule> thermal = cfg.thermal;
  Rng rng(cfg.seed);

  std::size_t version = 0;
  std::size_t cached_version = 0;
  double cached = st.pocket_accuracy;
  double previous_magnitude = magnitude();
  double previous_change = 0.0;
  bool done = cfg.ratchet && st.pocket_accuracy == 1.0;

  for (int epoch = 0; epoch < epochs && !done; ++epoch) {
    for (std::size_t draw = 0; draw < n; ++draw) {
      const std::size_t r = rng.index(n);
      const auto row = row_of(rows, m, r);
      const int q = labels[r];
      const int j = wta_classify(lm, row);
      if (j != q) {
        st.run = 0;
        const double c = thermal ? thermal_correction(*thermal, lm.class_weights[static_cast<std::size_t>(j)],
                                                      lm.class_weights[static_cast<std::size_t>(q)], row)
                                 : cfg.correction;
        error_correct(lm, row, q, j, c);
        ++version;
        continue;
      }
      ++st.run;
      if (st.run <= st.pocket_run) continue;
      if (cached_version != version) {
        cached = accuracy(lm);
        cached_version = version;
      }
      if (!cfg.ratchet || cached > st.pocket_accuracy) {
        st.pocket = lm;
        st.pocket_run = st.run;
        st.pocket_accuracy = cached;
        ++st.replacements;
        if (cfg.ratchet && cached == 1.0) {
          done = true;
          break;
        }
      }
    }
    ++st.epochs_run;
    st.accuracy_trace.push_back(st.pocket_accuracy);
    if (thermal) {
      const double now = magnitude();
      const double change = now - previous_magnitude;
      if (change < 0.0 && previous_change > 0.0) {
        thermal->beta = thermal->a * thermal->beta - thermal->b;
        if (thermal->beta <= 0.0) break;
      }
      previous_change = change;
      previous_magnitude = now;
    }
  }
  st.final_beta = thermal ? thermal->beta : 0.0;
  return st;
}

PocketState train_linear_machine(const Dataset& train, const PocketConfig& cfg) {
  train.validate();
  return train_pocket_ratchet(LinearMachine::zeros(train.class_count(), train.cols()),
                              train.features, train.labels, cfg);
}

Prediction predict_lm(const LinearMachine& lm, std::span<const double> x) {
  const Eigen::VectorXd g = discriminants(lm, x);
  const int label = wta_classify(lm, x);
  return {label, g(label)};
}

int tlu_output(const LinearTest& test, std::span<const double> x) {
  if (test.empty()) throw std::invalid_argument("tlu_output: untrained test");
  double g = test.weights[0];
  for (std::size_t i = 0; i < test.features.size(); ++i) {
    const auto f = static_cast<std::size_t>(test.features[i]);
    if (f >= x.size()) throw DataError("tlu_output: missing feature column " + std::to_string(f));
    g += test.weights[i + 1] * x[f];
  }
  return g >= 0.0 ? 1 : -1;
}

double test_accuracy(const LinearTest& test, const Dataset& data) {
  return 1.0 - classification_error(
                   [&](std::span<const double> x) { return tlu_output(test, x) > 0 ? 0 : 1; }, data);
}

namespace {

void check_binary(const Dataset& train, const Dataset& val) {
  if (train.cols() == 0) throw DataError("linear test: no feature columns");
  if (train.class_count() != 2) throw DataError("linear test: binary data required");
  if (val.rows() == 0) throw DataError("linear test: empty validation set");
  if (val.cols() != train.cols()) throw DataError("linear test: train/validation column mismatch");
}

}  // namespace

LinearTest train_test(const Dataset& train, const Dataset& val, std::vector<int> features,
                      const PocketConfig& cfg) {
  if (features.empty()) throw std::invalid_argument("train_test: empty feature subset");
  Eigen::MatrixXd sub(train.features.rows(), static_cast<Eigen::Index>(features.size()));
  for (std::size_t i = 0; i < features.size(); ++i) {
    sub.col(static_cast<Eigen::Index>(i)) = train.features.col(features[i]);
  }
  const PocketState st = train_pocket_ratchet(LinearMachine::zeros(2, features.size()), sub,
                                              train.labels, cfg);
  const Eigen::VectorXd w = st.pocket.class_weights[0] - st.pocket.class_weights[1];
  LinearTest test{std::move(features), {w.data(), w.data() + w.size()}, 0.0};
  test.accuracy = test_accuracy(test, val);
  return test;
}

LinearTest sfs_select(const Dataset& train, const Dataset& val, const PocketConfig& cfg,
                      std::vector<SfsStep>* trace) {
  check_binary(train, val);
  const auto m = static_cast<int>(train.cols());
  auto fit = [&](std::vector<int> features, int step, int f) {
    PocketConfig c = cfg;
    c.seed = mix_seed(cfg.seed, static_cast<std::uint64_t>(step), static_cast<std::uint64_t>(f));
    return train_test(train, val, std::move(features), c);
  };

  LinearTest current;
  for (int f = 0; f < m; ++f) {
    LinearTest t = fit({f}, 0, f);
    if (current.empty() || t.accuracy > current.accuracy) current = std::move(t);
  }
  LinearTest best = current;
  if (trace) trace->push_back({current.features, current.accuracy});

  for (int step = 1; static_cast<int>(current.features.size()) < m; ++step) {
    LinearTest next;
    for (int f = 0; f < m; ++f) {
      if (std::find(current.features.begin(), current.features.end(), f) != current.features.end()) continue;
      auto features = current.features;
      features.push_back(f);
      LinearTest t = fit(std::move(features), step, f);
      if (next.empty() || t.accuracy > next.accuracy) next = std::move(t);
    }
    if (next.accuracy < best.accuracy - 0.10) break;
    current = std::move(next);
    if (trace) trace->push_back({current.features, current.accuracy});
    if (current.accuracy > best.accuracy) best = current;
  }
  return best;
}

void DtConfig::validate() const {
  if (attempts < 1) throw std::invalid_argument("dt config: attempts N_a must be >= 1");
  if (max_features < 0) throw std::invalid_argument("dt config: N_f must be >= 0");
  if (pocket.epochs < 0) throw std::invalid_argument("dt config: pocket epochs must be >= 0");
}

LinearTest induce_dt(const Dataset& train, const Dataset& val, const DtConfig& cfg) {
  cfg.validate();
  check_binary(train, val);
  if (cfg.use_sfs) {
    PocketConfig c = cfg.pocket;
    c.seed = cfg.seed;
    return sfs_select(train, val, c);
  }
  const auto m = static_cast<int>(train.cols());
  const int limit = cfg.max_features == 0 ? m : std::min(cfg.max_features, m);
  auto fit = [&](std::vector<int> features, std::uint64_t a, std::uint64_t b) {
    PocketConfig c = cfg.pocket;
    c.seed = mix_seed(cfg.seed, a, b);
    return train_test(train, val, std::move(features), c);
  };

  std::vector<LinearTest> singles;
  std::vector<double> p(static_cast<std::size_t>(m));
  for (int f = 0; f < m; ++f) {
    singles.push_back(fit({f}, 0, static_cast<std::uint64_t>(f)));
    p[static_cast<std::size_t>(f)] = singles.back().accuracy;
  }
  const double top = *std::max_element(p.begin(), p.end());
  for (auto& v : p) v = top > 0.0 ? v / top : 1.0;
  std::vector<int> pool(static_cast<std::size_t>(m));
  std::iota(pool.begin(), pool.end(), 0);
  std::stable_sort(pool.begin(), pool.end(), [&](int a, int b) {
    return p[static_cast<std::size_t>(a)] > p[static_cast<std::size_t>(b)];
  });

  Rng rng(mix_seed(cfg.seed, 0x7a11));
  LinearTest best;
  double best_accuracy = 0.0;
  for (int attempt = 0; attempt < cfg.attempts; ++attempt) {
    LinearTest t;
    double accuracy = 0.0;
    for (std::size_t i = 0; i < pool.size() && static_cast<int>(t.features.size()) < limit; ++i) {
      const int f = pool[i];
      if (!(p[static_cast<std::size_t>(f)] > rng.uniform())) continue;
      auto features = t.features;
      features.push_back(f);
      LinearTest candidate = fit(std::move(features), static_cast<std::uint64_t>(attempt) + 1,
                                 static_cast<std::uint64_t>(i));
      if (candidate.accuracy > accuracy) {
        accuracy = candidate.accuracy;
        t = std::move(candidate);
      }
    }
    if (accuracy > best_accuracy) {
      best_accuracy = accuracy;
      best = std::move(t);
    }
  }
  if (best.empty()) best = singles[static_cast<std::size_t>(pool.front())];
  return best;
}

void PairwiseTree::validate() const {
  if (class_count < 2) throw std::invalid_argument("pairwise tree: need r >= 2");
  const auto expected = static_cast<std::size_t>(class_count * (class_count - 1) / 2);
  if (tlus.size() != expected) throw std::invalid_argument("pairwise tree: expected r(r-1)/2 tests");
  for (const auto& [key, test] : tlus) {
    if (key.first < 0 || key.first >= key.second || key.second >= class_count) {
      throw std::invalid_argument("pairwise tree: bad class pair");
    }
    if (test.weights.size() != test.features.size() + 1) {
      throw std::invalid_argument("pairwise tree: weight count does not match features");
    }
  }
}

namespace {

Dataset pair_subset(const Dataset& data, int i, int j) {
  std::vector<std::size_t> rows;
  for (std::size_t r = 0; r < data.rows(); ++r) {
    if (data.labels[r] == i || data.labels[r] == j) rows.push_back(r);
  }
  Dataset out = data.subset(rows);
  for (auto& label : out.labels) label = label == i ? 0 : 1;
  out.class_names = {data.class_names[static_cast<std::size_t>(i)],
                     data.class_names[static_cast<std::size_t>(j)]};
  return out;
}

}  // namespace

PairwiseTree train_pairwise_tree(const Dataset& train, const Dataset& val, const DtConfig& cfg,
                                 std::vector<PairReport>* report) {
  cfg.validate();
  const int r = train.class_count();
  if (r < 2) throw DataError("pairwise tree: need at least 2 classes");
  const auto counts = train.class_counts();
  const auto val_counts = val.class_counts();
  PairwiseTree tree;
  tree.class_count = r;
  for (int i = 0; i < r; ++i) {
    for (int j = i + 1; j < r; ++j) {
      if (counts[static_cast<std::size_t>(i)] == 0 || counts[static_cast<std::size_t>(j)] == 0) {
        throw DataError("pairwise tree: class pair (" + train.class_names[static_cast<std::size_t>(i)] +
                        ", " + train.class_names[static_cast<std::size_t>(j)] + ") has an empty side");
      }
      if (val_counts[static_cast<std::size_t>(i)] + val_counts[static_cast<std::size_t>(j)] == 0) {
        throw DataError("pairwise tree: no validation rows for a class pair");
      }
      DtConfig c = cfg;
      c.seed = mix_seed(cfg.seed, static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(j));
      const Dataset pair_val = pair_subset(val, i, j);
      LinearTest test = induce_dt(pair_subset(train, i, j), pair_val, c);
      if (report) report->push_back({i, j, 1.0 - test.accuracy, test.features.size()});
      tree.tlus.emplace(std::make_pair(i, j), std::move(test));
    }
  }
  return tree;
}

PairwiseDecision combine_pairwise(const std::map<std::pair<int, int>, int>& outputs, int classes) {
  if (classes < 2) throw std::invalid_argument("combine_pairwise: need r >= 2");
  if (outputs.size() != static_cast<std::size_t>(classes * (classes - 1) / 2)) {
    throw std::invalid_argument("combine_pairwise: incomplete pairwise outputs");
  }
  PairwiseDecision d;
  d.g.assign(static_cast<std::size_t>(classes), 0.0);
  for (int i = 0; i < classes; ++i) {
    for (int k = i + 1; k < classes; ++k) {
      const auto it = outputs.find({i, k});
      if (it == outputs.end()) throw std::invalid_argument("combine_pairwise: incomplete pairwise outputs");
      if (it->second != 1 && it->second != -1) throw std::invalid_argument("combine_pairwise: outputs must be +1 or -1");
      d.g[static_cast<std::size_t>(i)] += it->second;
      d.g[static_cast<std::size_t>(k)] -= it->second;
    }
  }
  d.label = static_cast<int>(std::max_element(d.g.begin(), d.g.end()) - d.g.begin());
  return d;
}

std::map<std::pair<int, int>, int> pairwise_outputs(const PairwiseTree& tree,
                                                    std::span<const double> x) {
  std::map<std::pair<int, int>, int> out;
  for (const auto& [key, test] : tree.tlus) out[key] = tlu_output(test, x);
  return out;
}

Prediction predict_pairwise(const PairwiseTree& tree, std::span<const double> x) {
  const PairwiseDecision d = combine_pairwise(pairwise_outputs(tree, x), tree.class_count);
  return {d.label, d.g[static_cast<std::size_t>(d.label)]};
}

SegmentSummary aggregate_segments(std::span<const int> predictions, int classes) {
  if (predictions.empty()) throw std::invalid_argument("aggregate_segments: empty prediction list");
  if (classes < 1) throw std::invalid_argument("aggregate_segments: need at least one class");
  std::vector<std::size_t> counts(static_cast<std::size_t>(classes), 0);
  for (const int p : predictions) {
    if (p < 0 || p >= classes) throw std::invalid_argument("aggregate_segments: class out of range");
    ++counts[static_cast<std::size_t>(p)];
  }
  SegmentSummary s;
  for (const auto c : counts) {
    s.distribution.push_back(static_cast<double>(c) / static_cast<double>(predictions.size()));
  }
  s.top_class = static_cast<int>(std::max_element(counts.begin(), counts.end()) - counts.begin());
  s.top_probability = s.distribution[static_cast<std::size_t>(s.top_class)];
  return s;
}

}  // namespace sonn
