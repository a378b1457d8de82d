#include "sonn/evaluation.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "sonn/errors.hpp"

namespace sonn {

EvalReport make_report(std::span<const int> truth, std::span<const int> predicted,
                       std::vector<std::string> class_names, const std::vector<std::string>* groups) {
  if (truth.empty()) throw DataError("evaluate: no rows");
  if (truth.size() != predicted.size()) throw std::invalid_argument("evaluate: length mismatch");
  const std::size_t r = class_names.size();
  EvalReport report;
  report.class_names = std::move(class_names);
  report.confusion.assign(r, std::vector<std::size_t>(r, 0));
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    ++report.confusion.at(static_cast<std::size_t>(truth[i])).at(static_cast<std::size_t>(predicted[i]));
    wrong += truth[i] != predicted[i];
  }
  report.error = static_cast<double>(wrong) / static_cast<double>(truth.size());

  if (groups) {
    if (groups->size() != truth.size()) throw std::invalid_argument("evaluate: one group per row required");
    std::vector<std::string> order;
    std::map<std::string, std::vector<int>> members;
    for (std::size_t i = 0; i < groups->size(); ++i) {
      auto [it, fresh] = members.try_emplace((*groups)[i]);
      if (fresh) order.push_back((*groups)[i]);
      it->second.push_back(predicted[i]);
    }
    for (const auto& g : order) {
      const auto& p = members.at(g);
      report.groups.push_back({g, p.size(), aggregate_segments(p, static_cast<int>(r))});
    }
  }
  return report;
}

EvalReport evaluate(const ModelFile& model, const Dataset& raw, const std::vector<std::string>* groups) {
  if (raw.class_names != model.class_names) {
    throw DataError("evaluate: data label mapping differs from the model's");
  }
  const auto predicted = predict_all(model, raw);
  return make_report(raw.labels, predicted, model.class_names, groups);
}

Dataset dataset_for_model(const ModelFile& model, const CsvTable& table) {
  for (const auto& name : model.feature_names) {
    if (!table.column(name)) throw DataError("data has no feature column '" + name + "'");
  }
  if (!table.column(model.label_column)) {
    throw DataError("data has no label column '" + model.label_column + "'");
  }
  LoadOptions options;
  options.label_column = model.label_column;
  options.class_names = model.class_names;
  for (const auto& h : table.header) {
    if (h != model.label_column &&
        std::find(model.feature_names.begin(), model.feature_names.end(), h) == model.feature_names.end()) {
      options.exclude.push_back(h);
    }
  }
  Dataset loaded = dataset_from_table(table, options);
  Dataset out;
  out.labels = loaded.labels;
  out.class_names = loaded.class_names;
  out.feature_names = model.feature_names;
  out.features.resize(loaded.features.rows(), static_cast<Eigen::Index>(model.feature_names.size()));
  for (std::size_t c = 0; c < model.feature_names.size(); ++c) {
    const auto at = std::find(loaded.feature_names.begin(), loaded.feature_names.end(), model.feature_names[c]);
    out.features.col(static_cast<Eigen::Index>(c)) = loaded.features.col(at - loaded.feature_names.begin());
  }
  return out;
}

std::vector<std::string> group_column(const CsvTable& table, const std::string& name) {
  const auto col = table.column(name);
  if (!col) throw DataError("data has no group column '" + name + "'");
  std::vector<std::string> out;
  for (const auto& row : table.rows) out.push_back(row.at(*col));
  return out;
}

namespace {

std::string fixed4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

}  // namespace

std::string format_report(const EvalReport& report) {
  std::ostringstream out;
  std::size_t n = 0;
  for (const auto& row : report.confusion) {
    for (const auto v : row) n += v;
  }
  out << "rows: " << n << "\nerror: " << fixed4(report.error) << "\nconfusion (rows true, columns predicted):\n";
  std::size_t width = 4;
  for (const auto& name : report.class_names) width = std::max(width, name.size() + 1);
  auto pad = [&](const std::string& s) { return std::string(width - std::min(width, s.size()), ' ') + s; };
  out << pad("");
  for (const auto& name : report.class_names) out << pad(name);
  out << '\n';
  for (std::size_t i = 0; i < report.confusion.size(); ++i) {
    out << pad(report.class_names[i]);
    for (const auto v : report.confusion[i]) out << pad(std::to_string(v));
    out << '\n';
  }
  if (!report.groups.empty()) {
    out << "groups:\n";
    for (const auto& g : report.groups) {
      out << "  " << g.group << " (" << g.count << " rows): "
          << report.class_names[static_cast<std::size_t>(g.summary.top_class)] << " p="
          << fixed4(g.summary.top_probability) << "  [";
      for (std::size_t c = 0; c < g.summary.distribution.size(); ++c) {
        out << (c ? " " : "") << fixed4(g.summary.distribution[c]);
      }
      out << "]\n";
    }
  }
  return out.str();
}

void write_report_csv(const EvalReport& report, std::ostream& out) {
  out << "true,predicted,count\n";
  for (std::size_t i = 0; i < report.confusion.size(); ++i) {
    for (std::size_t j = 0; j < report.confusion[i].size(); ++j) {
      out << report.class_names[i] << ',' << report.class_names[j] << ',' << report.confusion[i][j] << '\n';
    }
  }
  if (!report.groups.empty()) {
    out << "\ngroup,count,top_class,top_probability";
    for (const auto& name : report.class_names) out << ",p_" << name;
    out << '\n';
    for (const auto& g : report.groups) {
      out << g.group << ',' << g.count << ',' << report.class_names[static_cast<std::size_t>(g.summary.top_class)]
          << ',' << format_double(g.summary.top_probability);
      for (const double p : g.summary.distribution) out << ',' << format_double(p);
      out << '\n';
    }
  }
}

}  // namespace sonn
