#ifndef SONN_RULETREE_HPP
#define SONN_RULETREE_HPP

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace sonn {

struct ThresholdSplit {
  double threshold = 0.0;
  bool high_is_one = true;  // x > threshold predicts class 1
  std::size_t errors = 0;
};

// Best midpoint between consecutive distinct pooled values; ties go to the
// smaller threshold, then to high_is_one.
ThresholdSplit search_threshold(std::span<const double> values0, std::span<const double> values1);

// Single-feature test. `low`/`high` index child nodes or are -1 for a leaf
// labelled `low_class`/`high_class`.
struct RuleNode {
  int feature = 0;
  double threshold = 0.0;
  bool high_is_one = true;
  int low = -1;
  int high = -1;
  int low_class = 0;
  int high_class = 1;
};

/// nodes[0] is the root.
struct RuleTree {
  std::vector<RuleNode> nodes;
  std::vector<std::string> feature_names;
  std::vector<std::string> class_names{"0", "1"};

  bool empty() const { return nodes.empty(); }
  std::size_t depth() const;
  void validate() const;
};

// Rows of x0/x1 are full feature rows; `pool` lists the usable column indices.
RuleTree extract_rules(const Eigen::MatrixXd& x0, const Eigen::MatrixXd& x1, std::vector<int> pool,
                       std::vector<std::string> feature_names);

int classify_rule(const RuleTree& tree, std::span<const double> x);

// Nested if/else text, thresholds to 4 decimals.
std::string to_text(const RuleTree& tree);
std::string rules_to_dot(const RuleTree& tree);

}  // namespace sonn

#endif  // SONN_RULETREE_HPP
