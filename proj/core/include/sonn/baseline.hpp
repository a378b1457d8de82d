#ifndef SONN_BASELINE_HPP
#define SONN_BASELINE_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "sonn/dataset.hpp"
#include "sonn/neurocore.hpp"

namespace sonn {

/// Leading principal components of centred data. components.col(k) is the
/// k-th unit eigenvector; explained[k] its share of the total variance.
struct PcaTransform {
  Eigen::VectorXd mean;
  Eigen::MatrixXd components;
  std::vector<double> explained;

  std::size_t retained() const { return static_cast<std::size_t>(components.cols()); }
  Eigen::VectorXd transform(std::span<const double> x) const;
  Eigen::MatrixXd transform(const Eigen::MatrixXd& x) const;
  // Projected dataset with columns pc1..pck.
  Dataset apply(const Dataset& data) const;
};

// Smallest leading set of components whose cumulative explained variance
// reaches `variance_level`.
PcaTransform pca_fit(const Eigen::MatrixXd& x, double variance_level);

/// One sigmoid hidden layer and sigmoid outputs (one output for two classes,
/// r outputs otherwise). Column 0 of each weight matrix is the bias.
struct FnnModel {
  Eigen::MatrixXd hidden;  // h x (m + 1)
  Eigen::MatrixXd output;  // o x (h + 1)

  std::size_t inputs() const { return static_cast<std::size_t>(hidden.cols()) - 1; }
  std::size_t hidden_units() const { return static_cast<std::size_t>(hidden.rows()); }
  std::size_t outputs() const { return static_cast<std::size_t>(output.rows()); }
  void validate() const;
};

struct FnnConfig {
  int hidden = 4;
  double learning_rate = 0.5;
  int max_epochs = 2000;
  int patience = 100;
  int restarts = 10;
  double init_range = 0.5;
  std::uint64_t seed = 0;

  void validate() const;
};

struct TrainingCurve {
  std::vector<double> train_error;  // mean squared error per epoch, entry 0 before any step
  std::vector<double> val_error;
  std::size_t best_epoch = 0;       // k*
};

struct FnnResult {
  FnnModel model;
  TrainingCurve curve;
  int restart = 0;
  int failed_restarts = 0;
};

// Per-row targets: the 0/1 label for two classes, one-hot otherwise.
Eigen::MatrixXd fnn_targets(const Dataset& data, std::size_t outputs);

// Outputs for every row of x (n x o).
Eigen::MatrixXd fnn_forward(const FnnModel& model, const Eigen::MatrixXd& x);
Eigen::VectorXd fnn_forward(const FnnModel& model, std::span<const double> x);

// Mean over rows of the summed squared output errors, and its gradient.
double fnn_loss(const FnnModel& model, const Eigen::MatrixXd& x, const Eigen::MatrixXd& targets);
FnnModel fnn_gradient(const FnnModel& model, const Eigen::MatrixXd& x,
                      const Eigen::MatrixXd& targets);

// Batch gradient descent with early stopping at the validation minimum; the
// best restart by (validation error, restart index) is returned.
FnnResult train_fnn(const Dataset& train, const Dataset& val, const FnnConfig& cfg);

Prediction predict_fnn(const FnnModel& model, std::span<const double> x);

}  // namespace sonn

#endif  // SONN_BASELINE_HPP
