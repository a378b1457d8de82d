#include "sonn/neurocore.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sonn/errors.hpp"
#include "sonn/random.hpp"

namespace sonn {

void SigmoidNeuron::validate() const {
  if (weights.size() != inputs.size() + 1) {
    throw std::invalid_argument("sigmoid neuron: weight count must be input count + 1");
  }
}

void FitConfig::validate() const {
  if (epochs < 1) throw std::invalid_argument("fit config: epochs must be >= 1");
  if (restarts < 1) throw std::invalid_argument("fit config: restarts must be >= 1");
  if (!(learning_rate > 0.0)) throw std::invalid_argument("fit config: learning rate must be > 0");
  if (!(decision_threshold > 0.0 && decision_threshold < 1.0)) {
    throw std::invalid_argument("fit config: decision threshold must lie in (0,1)");
  }
}

double sigmoid(double activation) {
  const double y = 1.0 / (1.0 + std::exp(-activation));
  return std::clamp(y, kSigmoidFloor, 1.0 - kSigmoidFloor);
}

double sigmoid_out(const SigmoidNeuron& neuron, std::span<const double> inputs) {
  if (inputs.size() + 1 != neuron.weights.size()) {
    throw std::invalid_argument("sigmoid_out: input length does not match neuron");
  }
  double a = neuron.weights[0];
  for (std::size_t i = 0; i < inputs.size(); ++i) a += neuron.weights[i + 1] * inputs[i];
  return sigmoid(a);
}

Eigen::VectorXd sigmoid_outputs(const Eigen::VectorXd& weights, const Eigen::MatrixXd& inputs) {
  const Eigen::VectorXd a =
      (inputs * weights.tail(weights.size() - 1)).array() + weights(0);
  return a.unaryExpr([](double v) { return sigmoid(v); });
}

double sigmoid_sse(const Eigen::VectorXd& weights, const Eigen::MatrixXd& inputs,
                   std::span<const double> targets) {
  const Eigen::VectorXd y = sigmoid_outputs(weights, inputs);
  const Eigen::Map<const Eigen::VectorXd> t(targets.data(), static_cast<Eigen::Index>(targets.size()));
  return (y - t).squaredNorm();
}

Eigen::VectorXd sigmoid_sse_gradient(const Eigen::VectorXd& weights,
                                     const Eigen::MatrixXd& inputs,
                                     std::span<const double> targets) {
  const Eigen::VectorXd y = sigmoid_outputs(weights, inputs);
  const Eigen::Map<const Eigen::VectorXd> t(targets.data(), static_cast<Eigen::Index>(targets.size()));
  // d/da (y - t)^2 = 2 (y - t) y (1 - y)
  const Eigen::VectorXd delta = (2.0 * (y - t).array() * y.array() * (1.0 - y.array())).matrix();
  Eigen::VectorXd grad(weights.size());
  grad(0) = delta.sum();
  grad.tail(weights.size() - 1) = inputs.transpose() * delta;
  return grad;
}

namespace {

void check_targets(const Eigen::MatrixXd& inputs, std::span<const double> targets) {
  if (static_cast<std::size_t>(inputs.rows()) != targets.size()) {
    throw std::invalid_argument("fit: input rows and target count differ");
  }
  if (targets.size() < 2) throw TrainingError("fit: need at least 2 rows");
  bool has0 = false;
  bool has1 = false;
  for (const double t : targets) {
    if (t == 0.0) has0 = true;
    else if (t == 1.0) has1 = true;
    else throw std::invalid_argument("fit: targets must be 0 or 1");
  }
  if (!has0 || !has1) throw TrainingError("fit: targets contain a single class");
  if (!inputs.allFinite()) throw TrainingError("fit: non-finite input values");
}

bool finite(const Eigen::VectorXd& v) { return v.allFinite(); }

}  // namespace

SigmoidNeuron fit_neuron(SigmoidNeuron neuron, const Eigen::MatrixXd& inputs,
                         std::span<const double> targets, const FitConfig& cfg) {
  cfg.validate();
  const auto p = static_cast<Eigen::Index>(neuron.inputs.size());
  if (inputs.cols() != p) throw std::invalid_argument("fit_neuron: input columns do not match bindings");
  check_targets(inputs, targets);

  if (cfg.method == FitMethod::LeastSquares) {
    // Linear regression on logit-transformed targets (0 -> logit 0.1, 1 -> logit 0.9).
    const double hi = std::log(0.9 / 0.1);
    std::vector<double> logits(targets.size());
    std::transform(targets.begin(), targets.end(), logits.begin(),
                   [hi](double t) { return t > 0.5 ? hi : -hi; });
    Eigen::MatrixXd design(inputs.rows(), p + 1);
    design.col(0).setOnes();
    design.rightCols(p) = inputs;
    const Eigen::VectorXd w = least_squares_fit(design, logits);
    neuron.weights.assign(w.data(), w.data() + w.size());
    return neuron;
  }

  Eigen::VectorXd best;
  double best_sse = std::numeric_limits<double>::infinity();
  for (int restart = 0; restart < cfg.restarts; ++restart) {
    Rng rng(mix_seed(cfg.seed, static_cast<std::uint64_t>(restart)));
    Eigen::VectorXd w(p + 1);
    for (Eigen::Index i = 0; i < w.size(); ++i) w(i) = rng.uniform(-0.5, 0.5);
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
      w -= cfg.learning_rate * sigmoid_sse_gradient(w, inputs, targets);
    }
    if (!finite(w)) throw TrainingError("fit_neuron: weights diverged to non-finite values");
    const double sse = sigmoid_sse(w, inputs, targets);
    if (sse < best_sse) {
      best_sse = sse;
      best = w;
    }
  }
  neuron.weights.assign(best.data(), best.data() + best.size());
  return neuron;
}

double classification_error(std::span<const int> predicted, std::span<const int> labels) {
  if (predicted.empty()) throw std::invalid_argument("classification_error: empty data");
  if (predicted.size() != labels.size()) {
    throw std::invalid_argument("classification_error: length mismatch");
  }
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) wrong += predicted[i] != labels[i];
  return static_cast<double>(wrong) / static_cast<double>(predicted.size());
}

Eigen::VectorXd least_squares_fit(const Eigen::MatrixXd& design, std::span<const double> targets) {
  if (static_cast<std::size_t>(design.rows()) != targets.size()) {
    throw std::invalid_argument("least_squares_fit: design rows and target count differ");
  }
  if (design.rows() < design.cols()) {
    throw TrainingError("least_squares_fit: fewer rows than basis terms");
  }
  const Eigen::Map<const Eigen::VectorXd> t(targets.data(), static_cast<Eigen::Index>(targets.size()));
  Eigen::MatrixXd gram = design.transpose() * design;
  const Eigen::VectorXd rhs = design.transpose() * t;

  Eigen::LLT<Eigen::MatrixXd> llt(gram);
  if (llt.info() == Eigen::Success) {
    Eigen::VectorXd w = llt.solve(rhs);
    if (w.allFinite()) return w;
  }
  gram.diagonal().array() += 1e-10;
  llt.compute(gram);
  if (llt.info() != Eigen::Success) {
    throw TrainingError("least_squares_fit: design matrix is rank deficient");
  }
  Eigen::VectorXd w = llt.solve(rhs);
  if (!w.allFinite()) throw TrainingError("least_squares_fit: design matrix is rank deficient");
  return w;
}

Eigen::VectorXd fit_linear(const Eigen::MatrixXd& design, std::span<const double> targets,
                           const FitConfig& cfg) {
  cfg.validate();
  if (static_cast<std::size_t>(design.rows()) != targets.size()) {
    throw std::invalid_argument("fit_linear: design rows and target count differ");
  }
  if (!design.allFinite()) throw TrainingError("fit_linear: non-finite input values");
  if (cfg.method == FitMethod::LeastSquares) return least_squares_fit(design, targets);

  // Batch gradient descent on the mean squared error. The gradient
  // (2/n)(G w - b) only needs the Gram matrix G and b = X^T t.
  const Eigen::Map<const Eigen::VectorXd> t(targets.data(), static_cast<Eigen::Index>(targets.size()));
  const double n = static_cast<double>(design.rows());
  const Eigen::MatrixXd gram = design.transpose() * design / n;
  const Eigen::VectorXd rhs = design.transpose() * t / n;
  const double tt = t.squaredNorm() / n;

  Eigen::VectorXd best;
  double best_mse = std::numeric_limits<double>::infinity();
  for (int restart = 0; restart < cfg.restarts; ++restart) {
    Rng rng(mix_seed(cfg.seed, static_cast<std::uint64_t>(restart)));
    Eigen::VectorXd w(design.cols());
    for (Eigen::Index i = 0; i < w.size(); ++i) w(i) = rng.uniform(-0.5, 0.5);
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
      w -= cfg.learning_rate * 2.0 * (gram * w - rhs);
    }
    if (!w.allFinite()) throw TrainingError("fit_linear: weights diverged to non-finite values");
    const double mse = w.dot(gram * w) - 2.0 * w.dot(rhs) + tt;
    if (mse < best_mse) {
      best_mse = mse;
      best = w;
    }
  }
  return best;
}

CandidateScore exterior_criterion(std::span<const double> outputs,
                                  std::span<const double> targets) {
  if (targets.empty()) throw std::invalid_argument("exterior_criterion: empty validation set");
  if (outputs.size() != targets.size()) {
    throw std::invalid_argument("exterior_criterion: length mismatch");
  }
  double sum = 0.0;
  for (std::size_t k = 0; k < outputs.size(); ++k) {
    const double d = outputs[k] - targets[k];
    sum += d * d;
  }
  return {sum, ScoreKind::ExteriorCriterionSse};
}

CandidateScore exterior_criterion(const Eigen::MatrixXd& design, const Eigen::VectorXd& weights,
                                  std::span<const double> targets) {
  const Eigen::VectorXd out = design * weights;
  return exterior_criterion(std::span<const double>(out.data(), static_cast<std::size_t>(out.size())),
                            targets);
}

}  // namespace sonn
