#include "sonn/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "sonn/errors.hpp"
#include "sonn/random.hpp"

namespace sonn {

Eigen::VectorXd PcaTransform::transform(std::span<const double> x) const {
  if (static_cast<Eigen::Index>(x.size()) != mean.size()) {
    throw std::invalid_argument("pca: input length does not match");
  }
  const Eigen::Map<const Eigen::VectorXd> v(x.data(), mean.size());
  return components.transpose() * (v - mean);
}

Eigen::MatrixXd PcaTransform::transform(const Eigen::MatrixXd& x) const {
  if (x.cols() != mean.size()) throw std::invalid_argument("pca: column count does not match");
  return (x.rowwise() - mean.transpose()) * components;
}

Dataset PcaTransform::apply(const Dataset& data) const {
  Dataset out;
  out.features = transform(data.features);
  out.labels = data.labels;
  out.class_names = data.class_names;
  for (std::size_t k = 0; k < retained(); ++k) out.feature_names.push_back("pc" + std::to_string(k + 1));
  return out;
}

PcaTransform pca_fit(const Eigen::MatrixXd& x, double variance_level) {
  if (!(variance_level > 0.0 && variance_level <= 1.0)) {
    throw std::invalid_argument("pca_fit: variance level must lie in (0, 1]");
  }
  if (x.rows() < 2) throw DataError("pca_fit: need at least 2 rows");
  if (!x.allFinite()) throw DataError("pca_fit: non-finite values");
  PcaTransform pca;
  pca.mean = x.colwise().mean().transpose();
  const Eigen::MatrixXd centred = x.rowwise() - pca.mean.transpose();
  const Eigen::MatrixXd cov = centred.transpose() * centred / static_cast<double>(x.rows() - 1);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  if (eig.info() != Eigen::Success) throw TrainingError("pca_fit: eigen decomposition failed");

  const Eigen::Index m = x.cols();
  Eigen::VectorXd values = eig.eigenvalues().reverse().cwiseMax(0.0);
  Eigen::MatrixXd vectors = eig.eigenvectors().rowwise().reverse();
  const double total = values.sum();
  if (!(total > 0.0)) throw DataError("pca_fit: all columns are constant");

  Eigen::Index keep = m;
  double cumulative = 0.0;
  for (Eigen::Index k = 0; k < m; ++k) {
    cumulative += values(k) / total;
    if (cumulative >= variance_level - 1e-12) {
      keep = k + 1;
      break;
    }
  }
  pca.components = vectors.leftCols(keep);
  for (Eigen::Index k = 0; k < keep; ++k) {
    Eigen::Index arg = 0;
    pca.components.col(k).cwiseAbs().maxCoeff(&arg);
    if (pca.components(arg, k) < 0.0) pca.components.col(k) *= -1.0;
    pca.explained.push_back(values(k) / total);
  }
  return pca;
}

void FnnModel::validate() const {
  if (hidden.rows() < 1 || hidden.cols() < 2) throw std::invalid_argument("fnn: bad hidden layer shape");
  if (output.rows() < 1 || output.cols() != hidden.rows() + 1) {
    throw std::invalid_argument("fnn: output layer does not match hidden layer");
  }
  if (!hidden.allFinite() || !output.allFinite()) throw std::invalid_argument("fnn: non-finite weights");
}

void FnnConfig::validate() const {
  if (hidden < 1) throw std::invalid_argument("fnn config: hidden must be >= 1");
  if (!(learning_rate > 0.0)) throw std::invalid_argument("fnn config: learning rate must be > 0");
  if (max_epochs < 1) throw std::invalid_argument("fnn config: max_epochs must be >= 1");
  if (patience < 1) throw std::invalid_argument("fnn config: patience must be >= 1");
  if (restarts < 1) throw std::invalid_argument("fnn config: restarts must be >= 1");
  if (!(init_range > 0.0)) throw std::invalid_argument("fnn config: init range must be > 0");
}

Eigen::MatrixXd fnn_targets(const Dataset& data, std::size_t outputs) {
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(data.rows()),
                                            static_cast<Eigen::Index>(outputs));
  for (std::size_t r = 0; r < data.rows(); ++r) {
    const int label = data.labels[r];
    if (outputs == 1) {
      t(static_cast<Eigen::Index>(r), 0) = label == 1 ? 1.0 : 0.0;
    } else {
      t(static_cast<Eigen::Index>(r), label) = 1.0;
    }
  }
  return t;
}

namespace {

Eigen::MatrixXd layer(const Eigen::MatrixXd& w, const Eigen::MatrixXd& in) {
  const Eigen::MatrixXd a = (in * w.rightCols(w.cols() - 1).transpose()).rowwise() +
                            w.col(0).transpose();
  return a.unaryExpr([](double v) { return sigmoid(v); });
}

void check_shape(const FnnModel& model, const Eigen::MatrixXd& x) {
  if (static_cast<std::size_t>(x.cols()) != model.inputs()) {
    throw std::invalid_argument("fnn: input has " + std::to_string(x.cols()) + " columns, model expects " +
                                std::to_string(model.inputs()));
  }
}

// Loss and, when `grad` is non-null, its gradient in one pass.
double loss_and_gradient(const FnnModel& model, const Eigen::MatrixXd& x,
                         const Eigen::MatrixXd& t, FnnModel* grad) {
  const Eigen::MatrixXd h = layer(model.hidden, x);
  const Eigen::MatrixXd y = layer(model.output, h);
  const double n = static_cast<double>(x.rows());
  const Eigen::MatrixXd diff = y - t;
  if (grad) {
    const Eigen::MatrixXd d2 = (2.0 / n) * (diff.array() * y.array() * (1.0 - y.array())).matrix();
    grad->output.resize(model.output.rows(), model.output.cols());
    grad->output.col(0) = d2.colwise().sum().transpose();
    grad->output.rightCols(h.cols()) = d2.transpose() * h;
    const Eigen::MatrixXd dh = d2 * model.output.rightCols(h.cols());
    const Eigen::MatrixXd d1 = (dh.array() * h.array() * (1.0 - h.array())).matrix();
    grad->hidden.resize(model.hidden.rows(), model.hidden.cols());
    grad->hidden.col(0) = d1.colwise().sum().transpose();
    grad->hidden.rightCols(x.cols()) = d1.transpose() * x;
  }
  return diff.squaredNorm() / n;
}

}  // namespace

Eigen::MatrixXd fnn_forward(const FnnModel& model, const Eigen::MatrixXd& x) {
  check_shape(model, x);
  return layer(model.output, layer(model.hidden, x));
}

Eigen::VectorXd fnn_forward(const FnnModel& model, std::span<const double> x) {
  const Eigen::Map<const Eigen::RowVectorXd> row(x.data(), static_cast<Eigen::Index>(x.size()));
  return fnn_forward(model, Eigen::MatrixXd(row)).row(0).transpose();
}

double fnn_loss(const FnnModel& model, const Eigen::MatrixXd& x, const Eigen::MatrixXd& targets) {
  check_shape(model, x);
  return loss_and_gradient(model, x, targets, nullptr);
}

FnnModel fnn_gradient(const FnnModel& model, const Eigen::MatrixXd& x,
                      const Eigen::MatrixXd& targets) {
  check_shape(model, x);
  FnnModel grad;
  loss_and_gradient(model, x, targets, &grad);
  return grad;
}

FnnResult train_fnn(const Dataset& train, const Dataset& val, const FnnConfig& cfg) {
  cfg.validate();
  if (train.rows() == 0 || train.cols() == 0) throw DataError("fnn: empty training set");
  if (val.rows() == 0) throw DataError("fnn: empty validation set");
  if (val.cols() != train.cols()) throw DataError("fnn: train/validation column mismatch");
  if (train.class_count() < 2) throw DataError("fnn: need at least 2 classes");
  if (!train.features.allFinite() || !val.features.allFinite()) throw DataError("fnn: non-finite values");

  const std::size_t outputs = train.class_count() == 2 ? 1 : static_cast<std::size_t>(train.class_count());
  const Eigen::MatrixXd t = fnn_targets(train, outputs);
  const Eigen::MatrixXd tv = fnn_targets(val, outputs);
  const auto m = static_cast<Eigen::Index>(train.cols());

  FnnResult best;
  double best_val = std::numeric_limits<double>::infinity();
  bool any = false;
  for (int restart = 0; restart < cfg.restarts; ++restart) {
    Rng rng(mix_seed(cfg.seed, static_cast<std::uint64_t>(restart)));
    FnnModel model;
    model.hidden.resize(cfg.hidden, m + 1);
    model.output.resize(static_cast<Eigen::Index>(outputs), cfg.hidden + 1);
    for (auto* w : {&model.hidden, &model.output}) {
      for (Eigen::Index j = 0; j < w->cols(); ++j) {
        for (Eigen::Index i = 0; i < w->rows(); ++i) (*w)(i, j) = rng.uniform(-cfg.init_range, cfg.init_range);
      }
    }

    TrainingCurve curve;
    FnnModel snapshot = model;
    FnnModel grad;
    bool failed = false;
    for (int epoch = 0;; ++epoch) {
      const double train_loss = loss_and_gradient(model, train.features, t, &grad);
      const double val_loss = loss_and_gradient(model, val.features, tv, nullptr);
      if (!std::isfinite(train_loss) || !std::isfinite(val_loss) || !model.hidden.allFinite() ||
          !model.output.allFinite()) {
        failed = true;
        break;
      }
      curve.train_error.push_back(train_loss);
      curve.val_error.push_back(val_loss);
      if (val_loss < curve.val_error[curve.best_epoch]) {
        curve.best_epoch = static_cast<std::size_t>(epoch);
        snapshot = model;
      }
      if (epoch == cfg.max_epochs || static_cast<std::size_t>(epoch) - curve.best_epoch >= static_cast<std::size_t>(cfg.patience)) {
        break;
      }
      model.hidden -= cfg.learning_rate * grad.hidden;
      model.output -= cfg.learning_rate * grad.output;
    }
    if (failed) {
      ++best.failed_restarts;
      continue;
    }
    const double v = curve.val_error[curve.best_epoch];
    if (!any || v < best_val) {
      any = true;
      best_val = v;
      best.model = std::move(snapshot);
      best.curve = std::move(curve);
      best.restart = restart;
    }
  }
  if (!any) throw TrainingError("fnn: every restart produced non-finite values");
  return best;
}

Prediction predict_fnn(const FnnModel& model, std::span<const double> x) {
  const Eigen::VectorXd y = fnn_forward(model, x);
  if (y.size() == 1) return {y(0) >= 0.5 ? 1 : 0, y(0)};
  Eigen::Index arg = 0;
  const double top = y.maxCoeff(&arg);
  return {static_cast<int>(arg), top};
}

}  // namespace sonn
