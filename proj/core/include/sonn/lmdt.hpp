#ifndef SONN_LMDT_HPP
#define SONN_LMDT_HPP

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "sonn/dataset.hpp"
#include "sonn/neurocore.hpp"

namespace sonn {

/// r discriminants g_j(x) = w^j . (1, x).
struct LinearMachine {
  std::vector<Eigen::VectorXd> class_weights;

  int class_count() const { return static_cast<int>(class_weights.size()); }
  std::size_t input_count() const;
  void validate() const;
  static LinearMachine zeros(int classes, std::size_t inputs);
};

Eigen::VectorXd discriminants(const LinearMachine& lm, std::span<const double> x);
// Winner take all; ties go to the lowest class index.
int wta_classify(const LinearMachine& lm, std::span<const double> x);
double lm_accuracy(const LinearMachine& lm, const Eigen::MatrixXd& x, std::span<const int> labels);

// w^true += c (1, x) and w^predicted -= c (1, x).
void error_correct(LinearMachine& lm, std::span<const double> x, int true_class, int predicted,
                   double c);

struct ThermalSchedule {
  double beta = 2.0;
  double epsilon = 0.11;
  double a = 0.99;
  double b = 0.01;

  void validate() const;
};

// k = (w_j - w_i) . (1, x) / (2 (1, x) . (1, x)) + epsilon, c = beta / (beta + k^2).
// The trainer passes the wrongly winning class as j and the true class as i.
double thermal_correction(const ThermalSchedule& sched, const Eigen::VectorXd& w_j,
                          const Eigen::VectorXd& w_i, std::span<const double> x);

struct PocketConfig {
  int epochs = 0;  // n_e; 0 means one epoch per training example
  double correction = 1.0;
  bool ratchet = true;
  std::optional<ThermalSchedule> thermal;
  std::uint64_t seed = 0;
};

struct PocketState {
  LinearMachine pocket;
  std::size_t pocket_run = 0;     // L_p
  double pocket_accuracy = 0.0;   // A_p
  std::size_t run = 0;            // L
  int epochs_run = 0;
  double final_beta = 0.0;
  std::vector<double> accuracy_trace;  // A_p after each epoch
  std::size_t replacements = 0;
};

// Each epoch draws n random examples. Training stops early once the pocket
// classifies every training example (ratchet only) or when the thermal beta
// reaches zero.
PocketState train_pocket_ratchet(LinearMachine lm, const Eigen::MatrixXd& x,
                                 std::span<const int> labels, const PocketConfig& cfg);

// Multi-class linear machine on every feature column.
PocketState train_linear_machine(const Dataset& train, const PocketConfig& cfg);
Prediction predict_lm(const LinearMachine& lm, std::span<const double> x);

/// Two-class linear test over a feature subset: +1 when w . (1, x_subset) >= 0,
/// otherwise -1. On a binary dataset +1 stands for class 0.
struct LinearTest {
  std::vector<int> features;
  std::vector<double> weights;
  double accuracy = 0.0;

  bool empty() const { return features.empty(); }
};

int tlu_output(const LinearTest& test, std::span<const double> x);
double test_accuracy(const LinearTest& test, const Dataset& data);

// Fits a test on `features` of a binary `train` set and scores it on `val`.
LinearTest train_test(const Dataset& train, const Dataset& val, std::vector<int> features,
                      const PocketConfig& cfg);

struct SfsStep {
  std::vector<int> features;
  double accuracy = 0.0;
};

// Greedy bottom-up selection; stops once the best extension is more than
// 0.10 accuracy below the best accuracy seen, or all features are used.
LinearTest sfs_select(const Dataset& train, const Dataset& val, const PocketConfig& cfg,
                      std::vector<SfsStep>* trace = nullptr);

struct DtConfig {
  int max_features = 0;  // N_f; 0 means all features
  int attempts = 10;     // N_a
  bool use_sfs = false;
  PocketConfig pocket = [] {
    PocketConfig p;
    p.epochs = 20;
    return p;
  }();
  std::uint64_t seed = 0;

  void validate() const;
};

// Roulette search over features ranked by single-feature accuracy.
LinearTest induce_dt(const Dataset& train, const Dataset& val, const DtConfig& cfg);

/// One test f_{i/j} per class pair i < j; +1 votes for class i.
struct PairwiseTree {
  int class_count = 0;
  std::map<std::pair<int, int>, LinearTest> tlus;

  void validate() const;
};

struct PairReport {
  int i = 0;
  int j = 0;
  double error = 0.0;
  std::size_t feature_count = 0;
};

PairwiseTree train_pairwise_tree(const Dataset& train, const Dataset& val, const DtConfig& cfg,
                                 std::vector<PairReport>* report = nullptr);

struct PairwiseDecision {
  std::vector<double> g;
  int label = 0;
};

// g_i = sum_{k>i} f_{i/k} - sum_{k<i} f_{k/i}; argmax with ties to the lowest index.
PairwiseDecision combine_pairwise(const std::map<std::pair<int, int>, int>& outputs, int classes);
std::map<std::pair<int, int>, int> pairwise_outputs(const PairwiseTree& tree,
                                                    std::span<const double> x);
Prediction predict_pairwise(const PairwiseTree& tree, std::span<const double> x);

struct SegmentSummary {
  std::vector<double> distribution;
  int top_class = 0;
  double top_probability = 0.0;
};

SegmentSummary aggregate_segments(std::span<const int> predictions, int classes);

}  // namespace sonn

#endif  // SONN_LMDT_HPP
