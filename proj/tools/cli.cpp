#include "cli.hpp"

#include <algorithm>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "sonn/baseline.hpp"
#include "sonn/dataset.hpp"
#include "sonn/ecnn.hpp"
#include "sonn/errors.hpp"
#include "sonn/evaluation.hpp"
#include "sonn/gmdh.hpp"
#include "sonn/lmdt.hpp"
#include "sonn/model_io.hpp"
#include "sonn/ruletree.hpp"

namespace sonn::cli {

namespace {

using nlohmann::json;

struct Options {
  std::string kind;
  std::size_t n = 1000;
  int classes = 0;
  std::size_t dims = 2;
  std::size_t relevant = 4;
  std::size_t irrelevant = 68;
  double separation = 1.0;
  double radius = 3.0;
  double margin = 0.1;

  std::string data;
  std::string model;
  std::string out;
  std::string method;
  std::string split = "2/3:1/3";
  std::string label = "y";
  std::vector<std::string> exclude;
  std::string group_by;
  std::string format = "text";
  std::string report;
  std::string test;
  std::uint64_t seed = 1;

  std::string fit = "gradient";
  std::optional<double> lr;
  std::optional<int> epochs;
  std::optional<int> restarts;
  double threshold = 0.5;

  std::string poly = "bilinear";
  std::optional<int> survivors;
  int max_layers = 10;
  int attempts = 500;

  int n_f = 0;
  int n_a = 10;
  int tlu_epochs = 20;
  bool sfs = false;
  bool thermal = false;
  bool no_ratchet = false;
  double correction = 1.0;

  int hidden = 4;
  int patience = 100;
  std::optional<double> pca;
};

std::string fixed4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

void write_text(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw DataError("cannot write '" + path + "'");
  file << text;
  if (!file) throw DataError("write failed for '" + path + "'");
}

Dataset load_input(const Options& o) {
  LoadOptions lo;
  lo.label_column = o.label;
  lo.exclude = o.exclude;
  if (!o.group_by.empty()) lo.exclude.push_back(o.group_by);
  return load_csv(o.data, lo);
}

int cmd_generate(const Options& o, std::ostream& out) {
  Dataset data;
  if (o.kind == "xor") {
    data = gen_xor(o.n, o.seed);
  } else if (o.kind == "blobs") {
    data = gen_blobs(o.n, o.classes ? o.classes : 3, o.dims, o.seed, o.radius);
  } else if (o.kind == "separable") {
    data = gen_separable(o.n, o.classes ? o.classes : 3, o.dims, o.seed, o.margin);
  } else {
    data = gen_surrogate_eeg(o.n, o.relevant, o.irrelevant, o.classes ? o.classes : 2, o.seed,
                             o.separation)
               .data;
  }
  if (o.out.empty()) {
    write_csv(data, out);
  } else {
    write_csv(data, std::filesystem::path(o.out));
  }
  return kOk;
}

FitConfig fit_config(const Options& o) {
  FitConfig f;
  if (o.fit == "ls") f.method = FitMethod::LeastSquares;
  if (o.lr) f.learning_rate = *o.lr;
  if (o.epochs) f.epochs = *o.epochs;
  if (o.restarts) f.restarts = *o.restarts;
  f.decision_threshold = o.threshold;
  f.seed = o.seed;
  f.validate();
  return f;
}

json fit_json(const FitConfig& f) {
  return {{"fit", f.method == FitMethod::LeastSquares ? "ls" : "gradient"},
          {"lr", f.learning_rate},
          {"epochs", f.epochs},
          {"restarts", f.restarts},
          {"threshold", f.decision_threshold}};
}

PocketConfig pocket_config(const Options& o, int epochs) {
  PocketConfig p;
  p.epochs = epochs;
  p.correction = o.correction;
  p.ratchet = !o.no_ratchet;
  if (o.thermal) p.thermal = ThermalSchedule{};
  p.seed = o.seed;
  return p;
}

json pocket_json(const PocketConfig& p) {
  return {{"epochs", p.epochs}, {"correction", p.correction}, {"ratchet", p.ratchet}, {"thermal", p.thermal.has_value()}};
}

std::vector<std::string> names_of(const std::vector<std::string>& all, const std::vector<int>& columns) {
  std::vector<std::string> out;
  for (const int c : columns) out.push_back(all.at(static_cast<std::size_t>(c)));
  return out;
}

std::string joined(const std::vector<std::string>& names) {
  std::string s;
  for (const auto& n : names) s += (s.empty() ? "" : " ") + n;
  return s;
}

int cmd_train(const Options& o, std::ostream& out) {
  const Method method = parse_method(o.method);
  const Dataset data = load_input(o);
  if (o.classes != 0 && o.classes != data.class_count()) {
    throw DataError("data has " + std::to_string(data.class_count()) + " classes, --classes says " +
                    std::to_string(o.classes));
  }
  const auto fractions = parse_fractions(o.split);
  if (fractions.size() != 2) throw std::invalid_argument("--split needs exactly two parts (fit:validation)");
  const auto parts = split(data, {fractions, o.seed, true});

  ModelFile model;
  model.method = method;
  model.feature_names = data.feature_names;
  model.class_names = data.class_names;
  model.label_column = o.label;
  model.norm = method == Method::RuleTree ? NormParams::identity(data.cols()) : fit_zscore(parts[0]);
  const Dataset fit = model.norm.apply(parts[0]);
  const Dataset val = model.norm.apply(parts[1]);
  json config = {{"method", o.method}, {"split", o.split}};

  std::ostringstream detail;
  switch (method) {
    case Method::Ecnn: {
      const FitConfig f = fit_config(o);
      config["fit"] = fit_json(f);
      std::vector<CascadeStep> steps;
      CascadeNetwork net = train_ecnn(fit, val, f, &steps);
      std::size_t accepted = 0;
      for (const auto& s : steps) accepted += s.accepted;
      detail << "candidates tried: " << steps.size() << ", accepted: " << accepted << '\n'
             << "selected features: " << joined(names_of(data.feature_names, net.selected_features())) << '\n'
             << describe_cascade(net);
      model.payload = std::move(net);
      break;
    }
    case Method::GmdhLayered:
    case Method::GmdhRoulette: {
      GmdhConfig g;
      if (o.poly == "linear") g.kind = PolyKind::Linear;
      g.fit = fit_config(o);
      g.survivors = o.survivors;
      g.max_layers = o.max_layers;
      g.attempts = o.attempts;
      g.seed = o.seed;
      config["fit"] = fit_json(g.fit);
      config["kind"] = o.poly;
      GmdhTrace trace;
      PolyNetwork net;
      if (method == Method::GmdhLayered) {
        config["survivors"] = o.survivors ? json(*o.survivors) : json();
        config["max_layers"] = o.max_layers;
        net = train_gmdh_layered(fit, val, g, &trace);
        detail << "layer criteria:";
        for (const double s : net.layer_scores) detail << ' ' << format_double(s);
        if (net.rejected_layer_score) detail << " (rejected " << format_double(*net.rejected_layer_score) << ')';
        detail << '\n';
      } else {
        config["attempts"] = o.attempts;
        net = train_gmdh_roulette(fit, val, g, &trace);
        detail << "accepted neurons: " << trace.accepted << '\n';
      }
      detail << to_polynomial_text(net);
      model.payload = std::move(net);
      break;
    }
    case Method::Lm: {
      const PocketConfig p = pocket_config(o, o.epochs.value_or(0));
      config["pocket"] = pocket_json(p);
      PocketState st = train_linear_machine(fit, p);
      detail << "pocket accuracy: " << fixed4(st.pocket_accuracy) << " after " << st.epochs_run << " epochs\n";
      model.payload = std::move(st.pocket);
      break;
    }
    case Method::PairwiseDt: {
      DtConfig d;
      d.max_features = o.n_f;
      d.attempts = o.n_a;
      d.use_sfs = o.sfs;
      d.pocket = pocket_config(o, o.tlu_epochs);
      d.seed = o.seed;
      config["pocket"] = pocket_json(d.pocket);
      config["n_f"] = d.max_features;
      config["n_a"] = d.attempts;
      config["sfs"] = d.use_sfs;
      std::vector<PairReport> report;
      PairwiseTree tree = train_pairwise_tree(fit, val, d, &report);
      detail << "TLUs: " << tree.tlus.size() << '\n';
      std::ostringstream csv;
      csv << "pair,error,feature_count\n";
      for (const auto& r : report) {
        const std::string pair = data.class_names[static_cast<std::size_t>(r.i)] + "/" +
                                 data.class_names[static_cast<std::size_t>(r.j)];
        detail << "  " << pair << ": error " << fixed4(r.error) << ", features " << r.feature_count << '\n';
        csv << pair << ',' << format_double(r.error) << ',' << r.feature_count << '\n';
      }
      if (!o.report.empty()) write_text(o.report, csv.str(), out);
      model.payload = std::move(tree);
      break;
    }
    case Method::RuleTree: {
      if (data.class_count() != 2) throw std::invalid_argument("ruletree: binary data required");
      std::vector<std::size_t> rows0, rows1;
      for (std::size_t r = 0; r < fit.rows(); ++r) (fit.labels[r] == 0 ? rows0 : rows1).push_back(r);
      std::vector<int> pool(data.cols());
      for (std::size_t c = 0; c < pool.size(); ++c) pool[c] = static_cast<int>(c);
      RuleTree tree = extract_rules(fit.subset(rows0).features, fit.subset(rows1).features, pool,
                                    data.feature_names);
      tree.class_names = data.class_names;
      detail << to_text(tree);
      model.payload = std::move(tree);
      break;
    }
    case Method::Fnn: {
      FnnConfig f;
      f.hidden = o.hidden;
      if (o.lr) f.learning_rate = *o.lr;
      if (o.epochs) f.max_epochs = *o.epochs;
      if (o.restarts) f.restarts = *o.restarts;
      f.patience = o.patience;
      f.seed = o.seed;
      config["fnn"] = {{"hidden", f.hidden}, {"lr", f.learning_rate}, {"max_epochs", f.max_epochs},
                       {"patience", f.patience}, {"restarts", f.restarts}};
      FnnPayload payload;
      Dataset fit_in = fit;
      Dataset val_in = val;
      if (o.pca) {
        payload.pca = pca_fit(fit.features, *o.pca);
        fit_in = payload.pca->apply(fit);
        val_in = payload.pca->apply(val);
        config["pca"] = *o.pca;
        detail << "pca components: " << payload.pca->retained() << '\n';
      }
      FnnResult result = train_fnn(fit_in, val_in, f);
      detail << "best restart: " << result.restart << ", best epoch: " << result.curve.best_epoch
             << ", validation mse: " << fixed4(result.curve.val_error[result.curve.best_epoch]) << '\n';
      payload.model = std::move(result.model);
      model.payload = std::move(payload);
      break;
    }
  }

  model.provenance.seed = o.seed;
  model.provenance.config = config;
  model.provenance.dataset_fingerprint = dataset_fingerprint(data);
  model.validate();
  if (!o.model.empty()) save_model(model, o.model);

  const double fit_error = classification_error(
      [&](std::span<const double> x) { return predict_normalized(model, x).label; }, fit);
  const double val_error = classification_error(
      [&](std::span<const double> x) { return predict_normalized(model, x).label; }, val);
  const EvalReport all = evaluate(model, data);
  out << "method: " << method_tag(method) << '\n'
      << "rows: " << data.rows() << " (fit " << fit.rows() << ", validation " << val.rows() << ")\n"
      << detail.str() << "fit error: " << fixed4(fit_error) << '\n'
      << "validation error: " << fixed4(val_error) << '\n'
      << "error: " << fixed4(all.error) << '\n';
  return kOk;
}

int cmd_evaluate(const Options& o, std::ostream& out) {
  const ModelFile model = load_model(o.model);
  const CsvTable table = read_csv(o.data);
  const Dataset raw = dataset_for_model(model, table);
  std::vector<std::string> groups;
  if (!o.group_by.empty()) groups = group_column(table, o.group_by);
  const EvalReport report = evaluate(model, raw, o.group_by.empty() ? nullptr : &groups);
  out << format_report(report);
  if (!o.out.empty()) {
    std::ostringstream csv;
    write_report_csv(report, csv);
    write_text(o.out, csv.str(), out);
  }
  return kOk;
}

int cmd_export(const Options& o, std::ostream& out) {
  const ModelFile model = load_model(o.model);
  write_text(o.out, o.format == "dot" ? export_dot(model) : export_text(model), out);
  return kOk;
}

int cmd_extract_rules(const Options& o, std::ostream& out) {
  const ModelFile source = load_model(o.model);
  if (source.class_names.size() != 2) throw std::invalid_argument("extract-rules: binary models only");
  const Dataset raw = dataset_for_model(source, read_csv(o.data));
  const auto predicted = predict_all(source, raw);
  std::vector<std::size_t> rows0, rows1;
  for (std::size_t r = 0; r < raw.rows(); ++r) {
    if (predicted[r] != raw.labels[r]) continue;
    (raw.labels[r] == 0 ? rows0 : rows1).push_back(r);
  }
  if (rows0.empty() || rows1.empty()) {
    throw TrainingError("extract-rules: the model classifies no row of class '" +
                        source.class_names[rows0.empty() ? 0 : 1] + "' correctly");
  }
  RuleTree tree = extract_rules(raw.subset(rows0).features, raw.subset(rows1).features,
                                selected_features(source), raw.feature_names);
  tree.class_names = source.class_names;

  ModelFile model;
  model.method = Method::RuleTree;
  model.norm = NormParams::identity(raw.cols());
  model.feature_names = source.feature_names;
  model.class_names = source.class_names;
  model.label_column = source.label_column;
  model.payload = tree;
  model.provenance = source.provenance;
  model.provenance.config = {{"method", "ruletree"}, {"source", source.provenance.config}};
  model.validate();
  if (!o.out.empty()) save_model(model, o.out);

  out << "rows used: " << rows0.size() + rows1.size() << " of " << raw.rows() << '\n'
      << to_text(tree) << "rule error on data: " << fixed4(evaluate(model, raw).error) << '\n';
  if (!o.test.empty()) {
    const Dataset test = dataset_for_model(source, read_csv(o.test));
    const auto rule_report = evaluate(model, test);
    const auto source_report = evaluate(source, test);
    const auto wrong = [&](double e) { return static_cast<std::size_t>(e * static_cast<double>(test.rows()) + 0.5); };
    out << "test errors: rules " << wrong(rule_report.error) << ", source model " << wrong(source_report.error)
        << " of " << test.rows() << '\n';
  }
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Self-organizing neural network learners for classification"};
  app.name("sonn");
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("generate", "Write a synthetic dataset as CSV");
  gen->add_option("kind", o.kind, "xor | blobs | separable | surrogate-eeg")
      ->required()
      ->check(CLI::IsMember({"xor", "blobs", "separable", "surrogate-eeg"}));
  gen->add_option("--n", o.n, "Row count")->capture_default_str();
  gen->add_option("--seed", o.seed)->capture_default_str();
  gen->add_option("--out", o.out, "Output CSV (stdout when omitted)");
  gen->add_option("--classes", o.classes, "Class count");
  gen->add_option("--dims", o.dims, "Dimensions (blobs, separable)")->capture_default_str();
  gen->add_option("--relevant", o.relevant, "Informative columns (surrogate-eeg)")->capture_default_str();
  gen->add_option("--irrelevant", o.irrelevant, "Noise columns (surrogate-eeg)")->capture_default_str();
  gen->add_option("--separation", o.separation, "Class mean separation (surrogate-eeg)")->capture_default_str();
  gen->add_option("--radius", o.radius, "Centre circle radius (blobs)")->capture_default_str();
  gen->add_option("--margin", o.margin, "Rejection margin (separable)")->capture_default_str();

  auto* train = app.add_subcommand("train", "Train a model on a CSV dataset");
  train->add_option("--method", o.method, "ecnn | gmdh-layered | gmdh-roulette | lm | pairwise-dt | ruletree | fnn")
      ->required();
  train->add_option("--data", o.data)->required();
  train->add_option("--model", o.model, "Model file to write");
  train->add_option("--seed", o.seed)->capture_default_str();
  train->add_option("--split", o.split, "Fit:validation fractions")->capture_default_str();
  train->add_option("--label", o.label, "Label column")->capture_default_str();
  train->add_option("--exclude", o.exclude, "Columns to ignore")->delimiter(',');
  train->add_option("--group-by", o.group_by, "Grouping column to ignore while training");
  train->add_option("--classes", o.classes, "Expected class count");
  train->add_option("--report", o.report, "Per-pair report CSV (pairwise-dt)");
  train->add_option("--fit", o.fit, "Neuron fitting: gradient | ls")
      ->check(CLI::IsMember({"gradient", "ls"}))
      ->capture_default_str();
  train->add_option("--lr", o.lr, "Learning rate");
  train->add_option("--epochs", o.epochs, "Epochs (fit, lm, fnn)");
  train->add_option("--restarts", o.restarts, "Random restarts");
  train->add_option("--threshold", o.threshold, "Decision threshold (ecnn)")->capture_default_str();
  train->add_option("--kind", o.poly, "Polynomial kind: linear | bilinear")
      ->check(CLI::IsMember({"linear", "bilinear"}))
      ->capture_default_str();
  train->add_option("--survivors", o.survivors, "Survivors per layer F");
  train->add_option("--max-layers", o.max_layers)->capture_default_str();
  train->add_option("--attempts", o.attempts, "Roulette attempts")->capture_default_str();
  train->add_option("--n-f", o.n_f, "Max features per test (0 = all)")->capture_default_str();
  train->add_option("--n-a", o.n_a, "Test search attempts")->capture_default_str();
  train->add_option("--tlu-epochs", o.tlu_epochs, "Pocket epochs per test")->capture_default_str();
  train->add_flag("--sfs", o.sfs, "Select test features by sequential forward selection");
  train->add_flag("--thermal", o.thermal, "Thermal correction");
  train->add_flag("--no-ratchet", o.no_ratchet, "Plain pocket without ratchet");
  train->add_option("--correction", o.correction, "Correction step c")->capture_default_str();
  train->add_option("--hidden", o.hidden, "Hidden units (fnn)")->capture_default_str();
  train->add_option("--patience", o.patience, "Early-stopping patience (fnn)")->capture_default_str();
  train->add_option("--pca", o.pca, "PCA variance level (fnn)");

  auto* evaluate_cmd = app.add_subcommand("evaluate", "Evaluate a model on a CSV dataset");
  evaluate_cmd->add_option("--model", o.model)->required();
  evaluate_cmd->add_option("--data", o.data)->required();
  evaluate_cmd->add_option("--group-by", o.group_by, "Column whose groups get class distributions");
  evaluate_cmd->add_option("--out", o.out, "Report CSV");

  auto* exp = app.add_subcommand("export", "Export a model as text or DOT");
  exp->add_option("--model", o.model)->required();
  exp->add_option("--format", o.format)->check(CLI::IsMember({"text", "dot"}))->capture_default_str();
  exp->add_option("--out", o.out);

  auto* rules = app.add_subcommand("extract-rules", "Induce threshold rules from a binary model");
  rules->add_option("--model", o.model)->required();
  rules->add_option("--data", o.data, "Training data")->required();
  rules->add_option("--out", o.out, "Rule model file to write");
  rules->add_option("--test", o.test, "Test data for an error comparison");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*gen) return cmd_generate(o, out);
    if (*train) return cmd_train(o, out);
    if (*evaluate_cmd) return cmd_evaluate(o, out);
    if (*exp) return cmd_export(o, out);
    return cmd_extract_rules(o, out);
  } catch (const DataError& e) {
    err << "error: " << e.what() << '\n';
    return kData;
  } catch (const TrainingError& e) {
    err << "error: " << e.what() << '\n';
    return kTraining;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n' << app.help();
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kTraining;
  }
}

}  // namespace sonn::cli
