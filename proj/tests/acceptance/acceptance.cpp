// Acceptance checks. Run with no argument for every criterion, or name one.
// Prints one PASS/FAIL line per criterion and exits non-zero on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "sonn/baseline.hpp"
#include "sonn/ecnn.hpp"
#include "sonn/gmdh.hpp"
#include "sonn/lmdt.hpp"
#include "sonn/model_io.hpp"
#include "sonn/neurocore.hpp"
#include "sonn/ruletree.hpp"
#include "test_support.hpp"

using namespace sonn;
using sonn::testing::gradient_agrees;
using sonn::testing::random_matrix;
using sonn::testing::row_of;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), format, v);
  return buf;
}

template <typename Predict>
double error_on(const Dataset& data, Predict predict) {
  return classification_error([&](std::span<const double> x) { return predict(x); }, data);
}

Outcome pairwise_example() {
  const std::map<std::pair<int, int>, int> f{{{0, 1}, -1}, {{0, 2}, 1}, {{1, 2}, 1}};
  const auto start = Clock::now();
  const PairwiseDecision d = combine_pairwise(f, 3);
  const double elapsed = seconds_since(start);
  Outcome o;
  o.pass = d.g == std::vector<double>{0, 2, -2} && d.label == 1 && elapsed < 1e-3;
  o.detail = "g = (" + fmt("%g", d.g[0]) + ", " + fmt("%g", d.g[1]) + ", " + fmt("%g", d.g[2]) + "), class " +
             std::to_string(d.label + 1) + " of 3, " + fmt("%.1f us", elapsed * 1e6);
  return o;
}

// Three chained bilinear neurons reading 1-based columns 11, 69, 73 and 76.
PolyNetwork listing_network() {
  PolyNetwork net;
  for (int i = 1; i <= 76; ++i) net.feature_names.push_back("x" + std::to_string(i));
  auto neuron = [](std::vector<double> w, NodeRef a, NodeRef b) {
    return SupportingNeuron{PolyKind::Bilinear, std::move(w), a, b};
  };
  net.layers = {{neuron({0.6965, 0.3916, 0.2484, -0.2312}, NodeRef::feature(10), NodeRef::feature(68))},
                {neuron({0.3863, 0.5648, 0.5418, -0.4847}, NodeRef::neuron(1, 0), NodeRef::feature(72))},
                {neuron({0.1914, 0.7763, 0.2378, -0.2042}, NodeRef::neuron(2, 0), NodeRef::feature(75))}};
  net.output = NodeRef::neuron(3, 0);
  return net;
}

double listing_oracle(const std::vector<double>& x) {
  const double a = x[10], b = x[68], c = x[72], d = x[75];
  const double y1 = 0.6965 + 0.3916 * a + 0.2484 * b - 0.2312 * a * b;
  const double y2 = 0.3863 + 0.5648 * y1 + 0.5418 * c - 0.4847 * y1 * c;
  return 0.1914 + 0.7763 * y2 + 0.2378 * d - 0.2042 * y2 * d;
}

Outcome poly_fixture() {
  const auto start = Clock::now();
  const PolyNetwork net = listing_network();
  net.validate();
  const std::vector<double> zeros(76, 0.0);
  const double at_zero = poly_raw(net, zeros);
  const double expected_zero = 0.1914 + 0.7763 * (0.3863 + 0.5648 * 0.6965);
  double worst = 0.0;
  Rng rng(2024);
  for (int k = 0; k < 100; ++k) {
    std::vector<double> x(76);
    for (auto& v : x) v = rng.uniform(-1, 1);
    worst = std::max(worst, std::abs(poly_raw(net, x) - listing_oracle(x)));
  }
  const double elapsed = seconds_since(start);
  const std::string text = to_polynomial_text(net);
  Outcome o;
  o.pass = std::abs(at_zero - expected_zero) < 1e-12 && worst <= 1e-12 && elapsed < 1.0 &&
           text.rfind("y_1^(1) = 0.6965 + 0.3916*x11 + 0.2484*x69 - 0.2312*x11*x69", 0) == 0;
  o.detail = "output at 0 = " + fmt("%.10f", at_zero) + ", max |diff| over 100 inputs " + fmt("%.2e", worst) + ", " +
             fmt("%.3f s", elapsed);
  return o;
}

Outcome xor_gmdh() {
  const auto start = Clock::now();
  const Dataset train = gen_xor(1000, 101);
  const Dataset test = gen_xor(1000, 202);
  const auto parts = split(train, {{0.5, 0.5}, 101, true});
  GmdhConfig cfg;
  cfg.kind = PolyKind::Bilinear;
  cfg.seed = 101;
  cfg.fit.seed = 101;
  const PolyNetwork net = train_gmdh_layered(parts[0], parts[1], cfg);
  const double accuracy = 1.0 - error_on(test, [&](auto x) { return predict_poly(net, x).label; });
  const double elapsed = seconds_since(start);
  Outcome o;
  o.pass = accuracy >= 0.95 && elapsed < 10.0;
  o.detail = "test accuracy " + fmt("%.4f", accuracy) + ", " + std::to_string(net.neuron_count()) + " neuron(s), " +
             fmt("%.2f s", elapsed);
  return o;
}

Outcome ecnn_selection() {
  const auto start = Clock::now();
  int good = 0;
  double ecnn_sum = 0.0, fnn_sum = 0.0;
  const int seeds = 20;
  for (int s = 1; s <= seeds; ++s) {
    const auto seed = static_cast<std::uint64_t>(s);
    const SurrogateEeg gen = gen_surrogate_eeg(2000, 4, 68, 2, seed);
    const auto parts = split(gen.data, {{0.5, 0.25, 0.25}, seed, true});
    const NormParams norm = fit_zscore(parts[0]);
    const Dataset fit = norm.apply(parts[0]), val = norm.apply(parts[1]), test = norm.apply(parts[2]);

    FitConfig fc;
    fc.seed = seed;
    const CascadeNetwork net = train_ecnn(fit, val, fc);
    const auto chosen = net.selected_features();
    const std::set<int> informative(gen.informative.begin(), gen.informative.end());
    int hits = 0;
    for (const int f : chosen) hits += informative.count(f) ? 1 : 0;
    good += hits >= 3;
    ecnn_sum += error_on(test, [&](auto x) { return predict_cascade(net, x).label; });

    FnnConfig nc;
    nc.seed = seed;
    nc.restarts = 3;
    const FnnResult fnn = train_fnn(fit, val, nc);
    fnn_sum += error_on(test, [&](auto x) { return predict_fnn(fnn.model, x).label; });
  }
  const double ecnn_error = ecnn_sum / seeds, fnn_error = fnn_sum / seeds;
  const double elapsed = seconds_since(start);
  Outcome o;
  o.pass = good >= 16 && ecnn_error <= fnn_error + 0.02 && elapsed < 120.0;
  o.detail = std::to_string(good) + "/20 seeds select >= 3 informative columns; mean test error ECNN " +
             fmt("%.4f", ecnn_error) + " vs FNN " + fmt("%.4f", fnn_error) + ", " + fmt("%.1f s", elapsed);
  return o;
}

Outcome pocket_ratchet() {
  const auto start = Clock::now();
  int perfect = 0;
  bool monotone = true;
  int worst_epochs = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Dataset d = gen_separable(600, 3, 2, seed);
    PocketConfig cfg;
    cfg.seed = seed;
    const PocketState st = train_linear_machine(d, cfg);
    perfect += st.pocket_accuracy == 1.0 && st.epochs_run <= static_cast<int>(d.rows()) &&
               lm_accuracy(st.pocket, d.features, d.labels) == 1.0;
    for (std::size_t k = 1; k < st.accuracy_trace.size(); ++k) {
      monotone = monotone && st.accuracy_trace[k] >= st.accuracy_trace[k - 1];
    }
    worst_epochs = std::max(worst_epochs, st.epochs_run);
  }
  const double elapsed = seconds_since(start);
  Outcome o;
  o.pass = perfect == 10 && monotone && elapsed < 30.0;
  o.detail = std::to_string(perfect) + "/10 seeds reach accuracy 1.0 (at most " + std::to_string(worst_epochs) +
             " epochs), trace " + (monotone ? "non-decreasing" : "DECREASES") + ", " + fmt("%.2f s", elapsed);
  return o;
}

Outcome pairwise_blobs() {
  const auto start = Clock::now();
  const Dataset train = gen_blobs(600, 3, 2, 31);
  const Dataset test = gen_blobs(600, 3, 2, 32);
  const auto parts = split(train, {{2.0 / 3.0, 1.0 / 3.0}, 31, true});
  const NormParams norm = fit_zscore(parts[0]);
  DtConfig cfg;
  cfg.seed = 31;
  const PairwiseTree tree = train_pairwise_tree(norm.apply(parts[0]), norm.apply(parts[1]), cfg);
  const Dataset z = norm.apply(test);
  std::size_t right = 0;
  bool balanced = true;
  for (std::size_t r = 0; r < z.rows(); ++r) {
    const auto x = row_of(z, r);
    std::map<std::pair<int, int>, int> outputs;
    for (const auto& [pair, tlu] : tree.tlus) outputs[pair] = tlu_output(tlu, x);
    const PairwiseDecision d = combine_pairwise(outputs, 3);
    balanced = balanced && std::accumulate(d.g.begin(), d.g.end(), 0.0) == 0.0;
    right += d.label == z.labels[r];
  }
  const double accuracy = static_cast<double>(right) / static_cast<double>(z.rows());
  const double elapsed = seconds_since(start);
  Outcome o;
  o.pass = accuracy >= 0.90 && tree.tlus.size() == 3 && balanced && elapsed < 30.0;
  o.detail = "test accuracy " + fmt("%.4f", accuracy) + ", " + std::to_string(tree.tlus.size()) + " TLUs, sum g " +
             (balanced ? "= 0 everywhere" : "NON-ZERO") + ", " + fmt("%.2f s", elapsed);
  return o;
}

Outcome exterior_criterion_oracle() {
  Rng rng(77);
  double worst = 0.0;
  for (int instance = 0; instance < 100; ++instance) {
    const PolyKind kind = instance % 2 ? PolyKind::Bilinear : PolyKind::Linear;
    SupportingNeuron neuron{kind, {}, NodeRef::feature(0), NodeRef::feature(1)};
    for (std::size_t i = 0; i < weight_count(kind); ++i) neuron.weights.push_back(rng.normal());
    const std::size_t n = 5 + rng.index(60);
    std::vector<double> outputs(n), targets(n);
    Eigen::MatrixXd design(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(weight_count(kind)));
    double direct = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double v1 = rng.uniform(-2, 2), v2 = rng.uniform(-2, 2);
      targets[k] = rng.uniform() < 0.5 ? 0.0 : 1.0;
      outputs[k] = eval_supporting_neuron(neuron, v1, v2);
      const auto r = static_cast<Eigen::Index>(k);
      design(r, 0) = 1.0;
      design(r, 1) = v1;
      design(r, 2) = v2;
      if (kind == PolyKind::Bilinear) design(r, 3) = v1 * v2;
      double g = neuron.weights[0] + neuron.weights[1] * v1 + neuron.weights[2] * v2;
      if (kind == PolyKind::Bilinear) g += neuron.weights[3] * v1 * v2;
      direct += (g - targets[k]) * (g - targets[k]);
    }
    const Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(neuron.weights.data(),
                                                                static_cast<Eigen::Index>(neuron.weights.size()));
    worst = std::max(worst, std::abs(exterior_criterion(outputs, targets).value - direct));
    worst = std::max(worst, std::abs(exterior_criterion(design, w, targets).value - direct));
  }
  Outcome o;
  o.pass = worst <= 1e-12;
  o.detail = "max |CR - direct sum| over 100 instances " + fmt("%.2e", worst);
  return o;
}

Outcome rule_extraction() {
  Rng rng(5);
  int single = 0, inside = 0, clean = 0;
  const int fixtures = 20;
  for (int t = 0; t < fixtures; ++t) {
    const double cut = rng.uniform(-2, 2);
    const double gap = rng.uniform(0.01, 0.5);
    const bool ones_high = t % 2 == 0;
    const Eigen::Index n0 = 5 + static_cast<Eigen::Index>(rng.index(40));
    const Eigen::Index n1 = 5 + static_cast<Eigen::Index>(rng.index(40));
    Eigen::MatrixXd x0(n0, 1), x1(n1, 1);
    double lo_max = -1e300, hi_min = 1e300;
    auto fill = [&](Eigen::MatrixXd& m, bool high) {
      for (Eigen::Index r = 0; r < m.rows(); ++r) {
        m(r, 0) = high ? cut + gap + rng.uniform(0, 3) : cut - rng.uniform(0, 3);
        if (high) hi_min = std::min(hi_min, m(r, 0));
        else lo_max = std::max(lo_max, m(r, 0));
      }
    };
    fill(x1, ones_high);
    fill(x0, !ones_high);
    const RuleTree tree = extract_rules(x0, x1, {0}, {"x"});
    single += tree.nodes.size() == 1;
    inside += tree.nodes[0].threshold > lo_max && tree.nodes[0].threshold < hi_min;
    std::size_t errors = 0;
    for (Eigen::Index r = 0; r < n0; ++r) errors += classify_rule(tree, std::vector<double>{x0(r, 0)}) != 0;
    for (Eigen::Index r = 0; r < n1; ++r) errors += classify_rule(tree, std::vector<double>{x1(r, 0)}) != 1;
    clean += errors == 0;
  }

  RuleTree rule;
  rule.feature_names = {"x_1", "x_2", "x_3", "x_4", "x_5", "x_6"};
  rule.class_names = {"normal", "artifact"};
  rule.nodes.push_back({5, 1.081, true, -1, -1, 0, 1});
  std::vector<double> x(6, 0.0);
  auto at = [&](double v) {
    x[5] = v;
    return classify_rule(rule, x);
  };
  const bool text_ok = to_text(rule) == "if x_6 > 1.0810: artifact\nelse: normal\n";
  const bool strict = at(1.2) == 1 && at(1.0) == 0 && at(1.081) == 0;

  Outcome o;
  o.pass = single == fixtures && inside == fixtures && clean == fixtures && text_ok && strict;
  o.detail = std::to_string(single) + "/" + std::to_string(fixtures) + " single-node trees, " +
             std::to_string(inside) + " thresholds inside the gap, " + std::to_string(clean) +
             " with 0 training errors; rule text " + (text_ok ? "ok" : "WRONG") + ", boundary 1.081 -> " +
             (strict ? "class 0" : "WRONG");
  return o;
}

Outcome determinism() {
  const auto dir = sonn::testing::scratch_dir("determinism");
  std::ostringstream sink;
  auto run = [&](std::vector<std::string> args) { return cli::run(args, sink, sink); };
  const std::string bin = (dir / "bin.csv").string(), multi = (dir / "multi.csv").string();
  bool ok = run({"generate", "surrogate-eeg", "--n", "300", "--relevant", "3", "--irrelevant", "5", "--seed", "3",
                 "--out", bin}) == 0 &&
            run({"generate", "blobs", "--n", "300", "--classes", "3", "--seed", "3", "--out", multi}) == 0;

  const std::vector<std::pair<std::string, std::vector<std::string>>> jobs{
      {"ecnn", {"--data", bin}},
      {"gmdh-layered", {"--data", bin, "--survivors", "6"}},
      {"gmdh-roulette", {"--data", bin, "--attempts", "100"}},
      {"ruletree", {"--data", bin}},
      {"lm", {"--data", multi, "--epochs", "20"}},
      {"pairwise-dt", {"--data", multi}},
      {"fnn", {"--data", multi, "--epochs", "200", "--restarts", "2", "--pca", "0.95"}},
  };
  int identical = 0, exact = 0;
  std::string failures;
  Rng rng(9);
  for (const auto& [method, extra] : jobs) {
    std::string first;
    bool same = true;
    for (int round = 0; round < 2; ++round) {
      const auto path = dir / (method + std::to_string(round) + ".json");
      std::vector<std::string> args{"train", "--method", method, "--seed", "11", "--model", path.string()};
      args.insert(args.end(), extra.begin(), extra.end());
      if (run(args) != 0) {
        same = false;
        break;
      }
      const std::string bytes = sonn::testing::slurp(path);
      if (round == 0) first = bytes;
      else same = same && bytes == first && !bytes.empty();
    }
    identical += same;

    bool bit_exact = same;
    if (same) {
      const ModelFile original = deserialize_model(first);
      const auto path = dir / (method + "_copy.json");
      save_model(original, path);
      const ModelFile reloaded = load_model(path);
      for (int k = 0; k < 100 && bit_exact; ++k) {
        std::vector<double> x(original.feature_names.size());
        for (auto& v : x) v = rng.normal() * 2.0;
        const Prediction a = predict(original, x), b = predict(reloaded, x);
        bit_exact = a.label == b.label && a.score == b.score;
      }
    }
    exact += bit_exact;
    if (!same || !bit_exact) failures += " " + method;
  }
  ok = ok && identical == static_cast<int>(jobs.size()) && exact == static_cast<int>(jobs.size());
  Outcome o;
  o.pass = ok;
  o.detail = std::to_string(identical) + "/" + std::to_string(jobs.size()) + " methods byte-identical across runs, " +
             std::to_string(exact) + " bit-exact after save/load" + (failures.empty() ? "" : "; failed:" + failures);
  return o;
}

Outcome gradient_checks() {
  Rng rng(404);
  int neuro_ok = 0, fnn_ok = 0;
  double worst = 0.0;
  auto record = [&](double analytic, double numeric) {
    worst = std::max(worst, std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), 1e-12}));
    return gradient_agrees(analytic, numeric);
  };
  for (int point = 0; point < 20; ++point) {
    const Eigen::MatrixXd x = random_matrix(rng, 25, 3, -2, 2);
    std::vector<double> t(25);
    for (auto& v : t) v = rng.uniform() < 0.5 ? 0.0 : 1.0;
    Eigen::VectorXd w(4);
    for (int i = 0; i < 4; ++i) w(i) = rng.uniform(-2, 2);
    const Eigen::VectorXd g = sigmoid_sse_gradient(w, x, t);
    bool all = true;
    for (int i = 0; i < 4; ++i) {
      const double h = 1e-5;
      Eigen::VectorXd wp = w, wm = w;
      wp(i) += h;
      wm(i) -= h;
      const double fd = (sigmoid_sse(wp, x, t) - sigmoid_sse(wm, x, t)) / (2 * h);
      all = record(g(i), fd) && all;
    }
    neuro_ok += all;
  }
  for (int point = 0; point < 20; ++point) {
    const Eigen::Index o = point % 2 ? 3 : 1;
    FnnModel model;
    model.hidden = random_matrix(rng, 3, 4, -1.5, 1.5);
    model.output = random_matrix(rng, o, 4, -1.5, 1.5);
    const Eigen::MatrixXd x = random_matrix(rng, 15, 3, -2, 2);
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(15, o);
    for (Eigen::Index r = 0; r < 15; ++r) t(r, static_cast<Eigen::Index>(rng.index(static_cast<std::size_t>(o)))) = 1;
    const FnnModel g = fnn_gradient(model, x, t);
    bool all = true;
    for (int which = 0; which < 2; ++which) {
      const Eigen::MatrixXd& w = which ? model.output : model.hidden;
      const Eigen::MatrixXd& gw = which ? g.output : g.hidden;
      for (Eigen::Index i = 0; i < w.rows(); ++i) {
        for (Eigen::Index j = 0; j < w.cols(); ++j) {
          const double h = 1e-5;
          FnnModel plus = model, minus = model;
          (which ? plus.output : plus.hidden)(i, j) += h;
          (which ? minus.output : minus.hidden)(i, j) -= h;
          const double fd = (fnn_loss(plus, x, t) - fnn_loss(minus, x, t)) / (2 * h);
          all = record(gw(i, j), fd) && all;
        }
      }
    }
    fnn_ok += all;
  }
  Outcome o;
  o.pass = neuro_ok == 20 && fnn_ok == 20;
  o.detail = "sigmoid neuron " + std::to_string(neuro_ok) + "/20, FNN " + std::to_string(fnn_ok) +
             "/20 points within 1e-5 (worst relative difference " + fmt("%.1e", worst) + ")";
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"pairwise_example", pairwise_example},
      {"poly_fixture", poly_fixture},
      {"xor_gmdh", xor_gmdh},
      {"ecnn_selection", ecnn_selection},
      {"pocket_ratchet", pocket_ratchet},
      {"pairwise_blobs", pairwise_blobs},
      {"exterior_criterion", exterior_criterion_oracle},
      {"rule_extraction", rule_extraction},
      {"determinism", determinism},
      {"gradient_checks", gradient_checks},
  };
  const std::string only = argc > 1 ? argv[1] : "";
  int failed = 0, ran = 0;
  for (const auto& [name, check] : criteria) {
    if (!only.empty() && only != name) continue;
    ++ran;
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << std::endl;
    failed += !o.pass;
  }
  if (ran == 0) {
    std::cerr << "unknown criterion '" << only << "'\n";
    return 2;
  }
  return failed == 0 ? 0 : 1;
}
