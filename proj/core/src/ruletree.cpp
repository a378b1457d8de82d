#include "sonn/ruletree.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <tuple>
#include <utility>

#include "sonn/errors.hpp"

namespace sonn {

ThresholdSplit search_threshold(std::span<const double> values0, std::span<const double> values1) {
  if (values0.empty() || values1.empty()) {
    throw std::invalid_argument("search_threshold: both classes need at least one value");
  }
  std::vector<std::pair<double, int>> pooled;
  for (const double v : values0) pooled.emplace_back(v, 0);
  for (const double v : values1) pooled.emplace_back(v, 1);
  std::sort(pooled.begin(), pooled.end());
  const std::size_t n0 = values0.size();
  const std::size_t n1 = values1.size();

  // With one distinct value every row falls on the low side.
  ThresholdSplit best{pooled.front().first, true, n1};
  if (n0 < best.errors) best = {pooled.front().first, false, n0};
  bool have_midpoint = false;

  std::size_t below0 = 0;
  std::size_t below1 = 0;
  for (std::size_t k = 0; k < pooled.size();) {
    const double v = pooled[k].first;
    for (; k < pooled.size() && pooled[k].first == v; ++k) (pooled[k].second == 0 ? below0 : below1)++;
    if (k == pooled.size()) break;
    const double q = v + (pooled[k].first - v) / 2.0;
    // high side predicts 1: class-0 rows above and class-1 rows at or below are wrong
    const std::size_t high_one = (n0 - below0) + below1;
    const std::size_t low_one = below0 + (n1 - below1);
    for (const auto& [errors, high] : {std::pair{high_one, true}, std::pair{low_one, false}}) {
      if (!have_midpoint || errors < best.errors) {
        best = {q, high, errors};
        have_midpoint = true;
      }
    }
  }
  return best;
}

std::size_t RuleTree::depth() const {
  std::function<std::size_t(int)> walk = [&](int i) -> std::size_t {
    if (i < 0) return 0;
    const auto& node = nodes.at(static_cast<std::size_t>(i));
    return 1 + std::max(walk(node.low), walk(node.high));
  };
  return empty() ? 0 : walk(0);
}

void RuleTree::validate() const {
  if (empty()) throw std::invalid_argument("rule tree: no nodes");
  if (class_names.size() != 2) throw std::invalid_argument("rule tree: binary class names required");
  std::function<void(int, std::vector<int>&)> walk = [&](int i, std::vector<int>& path) {
    const auto& node = nodes.at(static_cast<std::size_t>(i));
    if (!std::isfinite(node.threshold)) throw std::invalid_argument("rule tree: non-finite threshold");
    if (node.feature < 0 || static_cast<std::size_t>(node.feature) >= feature_names.size()) {
      throw std::invalid_argument("rule tree: feature index out of range");
    }
    if (std::find(path.begin(), path.end(), node.feature) != path.end()) {
      throw std::invalid_argument("rule tree: feature repeated along a path");
    }
    path.push_back(node.feature);
    for (const int child : {node.low, node.high}) {
      if (child >= 0) {
        if (child <= i) throw std::invalid_argument("rule tree: child precedes parent");
        walk(child, path);
      }
    }
    path.pop_back();
  };
  std::vector<int> path;
  walk(0, path);
}

namespace {

struct Builder {
  const Eigen::MatrixXd& x0;
  const Eigen::MatrixXd& x1;
  RuleTree& tree;

  static int majority(std::size_t zeros, std::size_t ones) { return ones > zeros ? 1 : 0; }

  int find_node(const std::vector<Eigen::Index>& rows0, const std::vector<Eigen::Index>& rows1,
                std::vector<int> pool) {
    std::vector<double> v0(rows0.size());
    std::vector<double> v1(rows1.size());
    ThresholdSplit best;
    int feature = -1;
    for (const int f : pool) {
      for (std::size_t k = 0; k < rows0.size(); ++k) v0[k] = x0(rows0[k], f);
      for (std::size_t k = 0; k < rows1.size(); ++k) v1[k] = x1(rows1[k], f);
      const ThresholdSplit s = search_threshold(v0, v1);
      if (feature < 0 || s.errors < best.errors) {
        best = s;
        feature = f;
      }
    }
    const int id = static_cast<int>(tree.nodes.size());
    tree.nodes.push_back({feature, best.threshold, best.high_is_one});
    pool.erase(std::find(pool.begin(), pool.end(), feature));

    auto predicted = [&](double v) { return (v > best.threshold) == best.high_is_one ? 1 : 0; };
    std::vector<Eigen::Index> a0, a01, a1, a10;
    for (const auto r : rows0) (predicted(x0(r, feature)) == 0 ? a0 : a01).push_back(r);
    for (const auto r : rows1) (predicted(x1(r, feature)) == 1 ? a1 : a10).push_back(r);

    auto side = [&](const std::vector<Eigen::Index>& zeros, const std::vector<Eigen::Index>& ones,
                    const std::vector<Eigen::Index>& errors, int polarity, int& child, int& leaf) {
      child = -1;
      if (zeros.empty() && ones.empty()) {
        leaf = polarity;
      } else if (!pool.empty() && !errors.empty() && !zeros.empty() && !ones.empty() &&
                 zeros.size() + ones.size() >= 2) {
        child = find_node(zeros, ones, pool);
      } else {
        leaf = majority(zeros.size(), ones.size());
      }
    };
    int child0 = -1, leaf0 = 0, child1 = -1, leaf1 = 1;
    side(a0, a10, a10, 0, child0, leaf0);
    side(a01, a1, a01, 1, child1, leaf1);

    auto& node = tree.nodes[static_cast<std::size_t>(id)];
    if (node.high_is_one) {
      node.high = child1;
      node.high_class = leaf1;
      node.low = child0;
      node.low_class = leaf0;
    } else {
      node.high = child0;
      node.high_class = leaf0;
      node.low = child1;
      node.low_class = leaf1;
    }
    return id;
  }
};

}  // namespace

RuleTree extract_rules(const Eigen::MatrixXd& x0, const Eigen::MatrixXd& x1, std::vector<int> pool,
                       std::vector<std::string> feature_names) {
  if (x0.rows() == 0 || x1.rows() == 0) throw TrainingError("extract_rules: a class has no rows");
  if (pool.empty()) throw std::invalid_argument("extract_rules: empty feature pool");
  if (x0.cols() != x1.cols()) throw std::invalid_argument("extract_rules: column count mismatch");
  if (feature_names.size() != static_cast<std::size_t>(x0.cols())) {
    throw std::invalid_argument("extract_rules: one feature name per column required");
  }
  for (const int f : pool) {
    if (f < 0 || f >= x0.cols()) throw std::invalid_argument("extract_rules: pool column out of range");
    if (std::count(pool.begin(), pool.end(), f) > 1) throw std::invalid_argument("extract_rules: duplicate pool column");
  }
  if (!x0.allFinite() || !x1.allFinite()) throw DataError("extract_rules: non-finite values");

  RuleTree tree;
  tree.feature_names = std::move(feature_names);
  std::vector<Eigen::Index> rows0(static_cast<std::size_t>(x0.rows()));
  std::vector<Eigen::Index> rows1(static_cast<std::size_t>(x1.rows()));
  for (Eigen::Index r = 0; r < x0.rows(); ++r) rows0[static_cast<std::size_t>(r)] = r;
  for (Eigen::Index r = 0; r < x1.rows(); ++r) rows1[static_cast<std::size_t>(r)] = r;
  Builder{x0, x1, tree}.find_node(rows0, rows1, std::move(pool));
  return tree;
}

int classify_rule(const RuleTree& tree, std::span<const double> x) {
  if (tree.empty()) throw std::invalid_argument("classify_rule: untrained tree");
  int i = 0;
  for (;;) {
    const auto& node = tree.nodes[static_cast<std::size_t>(i)];
    if (static_cast<std::size_t>(node.feature) >= x.size()) {
      throw DataError("classify_rule: missing feature column " + std::to_string(node.feature));
    }
    const bool high = x[static_cast<std::size_t>(node.feature)] > node.threshold;
    const int next = high ? node.high : node.low;
    if (next < 0) return high ? node.high_class : node.low_class;
    i = next;
  }
}

namespace {

std::string fixed4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

void emit(const RuleTree& tree, int i, const std::string& indent, std::ostringstream& out) {
  const auto& node = tree.nodes[static_cast<std::size_t>(i)];
  auto branch = [&](int child, int leaf) {
    if (child < 0) {
      out << ' ' << tree.class_names.at(static_cast<std::size_t>(leaf)) << '\n';
    } else {
      out << '\n';
      emit(tree, child, indent + "  ", out);
    }
  };
  out << indent << "if " << tree.feature_names.at(static_cast<std::size_t>(node.feature)) << " > "
      << fixed4(node.threshold) << ':';
  branch(node.high, node.high_class);
  out << indent << "else:";
  branch(node.low, node.low_class);
}

}  // namespace

std::string to_text(const RuleTree& tree) {
  if (tree.empty()) throw std::invalid_argument("to_text: untrained tree");
  std::ostringstream out;
  emit(tree, 0, "", out);
  return out.str();
}

std::string rules_to_dot(const RuleTree& tree) {
  if (tree.empty()) throw std::invalid_argument("rules_to_dot: untrained tree");
  std::ostringstream out;
  out << "digraph rules {\n";
  std::size_t leaves = 0;
  for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
    const auto& node = tree.nodes[i];
    out << "  n" << i << " [shape=box, style=filled, fillcolor=gray80, label=\""
        << tree.feature_names.at(static_cast<std::size_t>(node.feature)) << " > "
        << fixed4(node.threshold) << "\"];\n";
    for (const auto& [child, leaf, tag] : {std::tuple{node.high, node.high_class, "yes"},
                                           std::tuple{node.low, node.low_class, "no"}}) {
      if (child >= 0) {
        out << "  n" << i << " -> n" << child << " [label=\"" << tag << "\"];\n";
      } else {
        out << "  leaf" << leaves << " [shape=ellipse, label=\""
            << tree.class_names.at(static_cast<std::size_t>(leaf)) << "\"];\n";
        out << "  n" << i << " -> leaf" << leaves << " [label=\"" << tag << "\"];\n";
        ++leaves;
      }
    }
  }
  out << "}\n";
  return out.str();
}

}  // namespace sonn
