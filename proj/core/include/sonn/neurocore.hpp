#ifndef SONN_NEUROCORE_HPP
#define SONN_NEUROCORE_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "sonn/dataset.hpp"

namespace sonn {

// Where a neuron input comes from: a feature column or an earlier neuron.
struct InputRef {
  enum class Kind { Feature, Neuron };
  Kind kind = Kind::Feature;
  int index = 0;

  static InputRef feature(int column) { return {Kind::Feature, column}; }
  static InputRef neuron(int id) { return {Kind::Neuron, id}; }
  bool is_feature() const { return kind == Kind::Feature; }
  bool operator==(const InputRef&) const = default;
};

/// Logistic unit over p bound inputs. weights[0] is the bias, weights[i]
/// multiplies input i-1, so weights.size() == inputs.size() + 1.
struct SigmoidNeuron {
  std::vector<double> weights;
  std::vector<InputRef> inputs;

  void validate() const;
};

enum class FitMethod { Gradient, LeastSquares };

struct FitConfig {
  FitMethod method = FitMethod::Gradient;
  double learning_rate = 0.1;
  int epochs = 200;
  int restarts = 5;
  std::uint64_t seed = 0;
  double decision_threshold = 0.5;

  void validate() const;
};

enum class ScoreKind { ValidationErrorFraction, ExteriorCriterionSse };

struct CandidateScore {
  double value = 0.0;
  ScoreKind kind = ScoreKind::ValidationErrorFraction;
};

/// Result of a single-row prediction: class id plus the raw model score.
struct Prediction {
  int label = 0;
  double score = 0.0;
};

inline constexpr double kSigmoidFloor = 1e-12;

// Logistic function clamped to [1e-12, 1 - 1e-12].
double sigmoid(double activation);

double sigmoid_out(const SigmoidNeuron& neuron, std::span<const double> inputs);

// Row-wise outputs for a p-column input matrix.
Eigen::VectorXd sigmoid_outputs(const Eigen::VectorXd& weights, const Eigen::MatrixXd& inputs);

// Sum of squared errors of the sigmoid outputs.
double sigmoid_sse(const Eigen::VectorXd& weights, const Eigen::MatrixXd& inputs,
                   std::span<const double> targets);

// Gradient of sigmoid_sse with respect to the weights.
Eigen::VectorXd sigmoid_sse_gradient(const Eigen::VectorXd& weights,
                                     const Eigen::MatrixXd& inputs,
                                     std::span<const double> targets);

// Fits the neuron's weights to 0/1 targets; `inputs` has one column per bound
// input. Keeps the restart with the lowest training SSE.
SigmoidNeuron fit_neuron(SigmoidNeuron neuron, const Eigen::MatrixXd& inputs,
                         std::span<const double> targets, const FitConfig& cfg);

double classification_error(std::span<const int> predicted, std::span<const int> labels);

// `predict` maps a feature row (std::span<const double>) to a class id.
template <typename Predictor>
double classification_error(const Predictor& predict, const Dataset& data) {
  if (data.rows() == 0) throw std::invalid_argument("classification_error: empty data");
  std::size_t wrong = 0;
  Eigen::VectorXd row(data.features.cols());
  for (std::size_t r = 0; r < data.rows(); ++r) {
    row = data.features.row(static_cast<Eigen::Index>(r));
    if (predict(std::span<const double>(row.data(), static_cast<std::size_t>(row.size()))) !=
        data.labels[r]) {
      ++wrong;
    }
  }
  return static_cast<double>(wrong) / static_cast<double>(data.rows());
}

// Minimizes ||design * w - targets||^2 through the normal equations; a ridge of
// 1e-10 on the diagonal is added when the Gram matrix is singular.
Eigen::VectorXd least_squares_fit(const Eigen::MatrixXd& design, std::span<const double> targets);

// Fits a linear-in-weights unit (no squashing) over the given design matrix,
// by batch gradient descent or by least squares as configured.
Eigen::VectorXd fit_linear(const Eigen::MatrixXd& design, std::span<const double> targets,
                           const FitConfig& cfg);

// Sum of squared differences between outputs and targets on held-out rows.
CandidateScore exterior_criterion(std::span<const double> outputs,
                                  std::span<const double> targets);
CandidateScore exterior_criterion(const Eigen::MatrixXd& design, const Eigen::VectorXd& weights,
                                  std::span<const double> targets);

}  // namespace sonn

#endif  // SONN_NEUROCORE_HPP
