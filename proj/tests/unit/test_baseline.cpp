#include <gtest/gtest.h>

#include <cmath>

#include "sonn/baseline.hpp"
#include "sonn/errors.hpp"
#include "test_support.hpp"

using namespace sonn;
using sonn::testing::gradient_agrees;
using sonn::testing::make_dataset;
using sonn::testing::random_matrix;

namespace {

double logistic(double a) { return 1.0 / (1.0 + std::exp(-a)); }

FnnModel random_model(Rng& rng, Eigen::Index m, Eigen::Index h, Eigen::Index o, double scale = 1.0) {
  FnnModel model;
  model.hidden = random_matrix(rng, h, m + 1, -scale, scale);
  model.output = random_matrix(rng, o, h + 1, -scale, scale);
  return model;
}

// Forward pass written out unit by unit.
std::vector<double> forward_oracle(const FnnModel& model, const std::vector<double>& x) {
  std::vector<double> h(static_cast<std::size_t>(model.hidden.rows()));
  for (Eigen::Index j = 0; j < model.hidden.rows(); ++j) {
    double a = model.hidden(j, 0);
    for (std::size_t i = 0; i < x.size(); ++i) a += model.hidden(j, static_cast<Eigen::Index>(i) + 1) * x[i];
    h[static_cast<std::size_t>(j)] = logistic(a);
  }
  std::vector<double> y(static_cast<std::size_t>(model.output.rows()));
  for (Eigen::Index k = 0; k < model.output.rows(); ++k) {
    double a = model.output(k, 0);
    for (std::size_t j = 0; j < h.size(); ++j) a += model.output(k, static_cast<Eigen::Index>(j) + 1) * h[j];
    y[static_cast<std::size_t>(k)] = logistic(a);
  }
  return y;
}

void check_gradient(const FnnModel& model, const Eigen::MatrixXd& x, const Eigen::MatrixXd& t) {
  const FnnModel g = fnn_gradient(model, x, t);
  const double step = 1e-5;
  for (int which = 0; which < 2; ++which) {
    const Eigen::MatrixXd& w = which ? model.output : model.hidden;
    const Eigen::MatrixXd& gw = which ? g.output : g.hidden;
    ASSERT_EQ(gw.rows(), w.rows());
    ASSERT_EQ(gw.cols(), w.cols());
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
      for (Eigen::Index j = 0; j < w.cols(); ++j) {
        FnnModel plus = model, minus = model;
        (which ? plus.output : plus.hidden)(i, j) += step;
        (which ? minus.output : minus.hidden)(i, j) -= step;
        const double fd = (fnn_loss(plus, x, t) - fnn_loss(minus, x, t)) / (2 * step);
        EXPECT_TRUE(gradient_agrees(gw(i, j), fd)) << gw(i, j) << " vs " << fd;
      }
    }
  }
}

Dataset isotropic(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXd x(static_cast<Eigen::Index>(n), 2);
  for (Eigen::Index r = 0; r < x.rows(); ++r) x(r, 0) = rng.normal(), x(r, 1) = rng.normal();
  return make_dataset(x, std::vector<int>(n, 0));
}

}  // namespace

TEST(Pca, RankOneData) {
  Eigen::MatrixXd x(50, 2);
  for (int i = 0; i < 50; ++i) x(i, 0) = 0.1 * i - 2.0, x(i, 1) = 2.0 * x(i, 0);
  const PcaTransform p = pca_fit(x, 0.99);
  EXPECT_EQ(p.retained(), 1u);
  EXPECT_NEAR(p.explained[0], 1.0, 1e-12);
  EXPECT_NEAR(std::abs(p.components(0, 0)), 1.0 / std::sqrt(5.0), 1e-12);
}

TEST(Pca, IsotropicGaussianSplitsVarianceEvenly) {
  const Dataset d = isotropic(10000, 3);
  const PcaTransform p = pca_fit(d.features, 1.0);
  ASSERT_EQ(p.retained(), 2u);
  EXPECT_NEAR(p.explained[0], 0.5, 0.05);
  EXPECT_NEAR(p.explained[1], 0.5, 0.05);
  EXPECT_GE(p.explained[0], p.explained[1]);
}

TEST(Pca, OrthonormalDiagonalAndComplete) {
  Rng rng(5);
  Eigen::MatrixXd x = random_matrix(rng, 40, 4);
  x.col(2) += 0.8 * x.col(0);
  x.col(3) = 0.5 * x.col(1) - 0.2 * x.col(2) + 0.05 * x.col(3);
  const PcaTransform p = pca_fit(x, 1.0);
  ASSERT_EQ(p.retained(), 4u);
  EXPECT_LT((p.components.transpose() * p.components - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff(), 1e-8);
  const Eigen::MatrixXd z = p.transform(x);
  const Eigen::MatrixXd zc = z.rowwise() - z.colwise().mean();
  const Eigen::MatrixXd cov = zc.transpose() * zc / 39.0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      if (i != j) EXPECT_LT(std::abs(cov(i, j)), 1e-8);
  const Eigen::MatrixXd back = (z * p.components.transpose()).rowwise() + p.mean.transpose();
  EXPECT_LT((back - x).cwiseAbs().maxCoeff(), 1e-10);
  const Dataset projected = p.apply(make_dataset(x, std::vector<int>(40, 0)));
  EXPECT_EQ(projected.feature_names, (std::vector<std::string>{"pc1", "pc2", "pc3", "pc4"}));
}

TEST(Pca, ConstantDataIsDegenerate) {
  Eigen::MatrixXd x = Eigen::MatrixXd::Constant(10, 3, 2.5);
  EXPECT_THROW(pca_fit(x, 0.9), DataError);
}

TEST(Fnn, GradientMatchesCentralDifferences) {
  Rng rng(31);
  for (int point = 0; point < 20; ++point) {
    const Eigen::Index o = point % 2 ? 3 : 1;
    const FnnModel model = random_model(rng, 3, 4, o, 1.5);
    const Eigen::MatrixXd x = random_matrix(rng, 12, 3, -2, 2);
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(12, o);
    for (Eigen::Index r = 0; r < 12; ++r) t(r, static_cast<Eigen::Index>(rng.index(static_cast<std::size_t>(o)))) = 1.0;
    check_gradient(model, x, t);
  }
}

TEST(Fnn, ForwardMatchesOracle) {
  Rng rng(2);
  const FnnModel model = random_model(rng, 5, 3, 2);
  for (int k = 0; k < 50; ++k) {
    std::vector<double> x(5);
    for (auto& v : x) v = rng.uniform(-3, 3);
    const Eigen::VectorXd y = fnn_forward(model, x);
    const auto expected = forward_oracle(model, x);
    for (std::size_t i = 0; i < expected.size(); ++i) EXPECT_NEAR(y(static_cast<Eigen::Index>(i)), expected[i], 1e-12);
  }
}

TEST(Fnn, ScalarCases) {
  FnnModel zero;
  zero.hidden = Eigen::MatrixXd::Zero(2, 3);
  zero.output = Eigen::MatrixXd::Zero(1, 3);
  const std::vector<double> x{0.3, -4.0};
  EXPECT_EQ(predict_fnn(zero, x).score, 0.5);

  FnnModel one;
  one.hidden = Eigen::MatrixXd(1, 2);
  one.hidden << 0.0, 1.0;
  one.output = Eigen::MatrixXd(1, 2);
  one.output << 0.0, 1.0;
  const std::vector<double> u{1.0};
  EXPECT_NEAR(logistic(1.0), 0.731058, 1e-6);
  EXPECT_NEAR(predict_fnn(one, u).score, logistic(logistic(1.0)), 1e-15);
  const std::vector<double> wrong{1.0, 2.0};
  EXPECT_THROW(predict_fnn(one, wrong), std::invalid_argument);
}

TEST(Fnn, SnapshotReproducesRecordedMinimum) {
  const Dataset d = gen_blobs(300, 3, 2, 4);
  const auto parts = split(d, {{2.0 / 3.0, 1.0 / 3.0}, 4, true});
  FnnConfig cfg;
  cfg.restarts = 3;
  cfg.max_epochs = 300;
  cfg.patience = 50;
  const FnnResult r = train_fnn(parts[0], parts[1], cfg);
  ASSERT_EQ(r.model.outputs(), 3u);
  const double at_best = fnn_loss(r.model, parts[1].features, fnn_targets(parts[1], 3));
  EXPECT_EQ(at_best, r.curve.val_error[r.curve.best_epoch]);
  EXPECT_LE(r.curve.val_error[r.curve.best_epoch], r.curve.val_error.back());
  EXPECT_EQ(r.curve.best_epoch,
            static_cast<std::size_t>(std::min_element(r.curve.val_error.begin(), r.curve.val_error.end()) -
                                     r.curve.val_error.begin()));
  const FnnResult again = train_fnn(parts[0], parts[1], cfg);
  EXPECT_TRUE(again.model.hidden == r.model.hidden);
}

TEST(Fnn, SeparableDataTwoHiddenUnits) {
  int perfect = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Dataset d = gen_separable(300, 2, 2, seed);
    const auto parts = split(d, {{2.0 / 3.0, 1.0 / 3.0}, seed, true});
    FnnConfig cfg;
    cfg.hidden = 2;
    cfg.max_epochs = 500;
    cfg.restarts = 1;
    cfg.patience = 500;
    cfg.seed = seed;
    const FnnResult r = train_fnn(parts[0], parts[1], cfg);
    const double err = classification_error(
        [&](std::span<const double> x) { return predict_fnn(r.model, x).label; }, parts[1]);
    perfect += err == 0.0;
  }
  EXPECT_GE(perfect, 9);
}

namespace {

double best_xor_training_accuracy(int hidden) {
  const Dataset d = gen_xor(1000, 1);
  const auto parts = split(d, {{2.0 / 3.0, 1.0 / 3.0}, 1, true});
  double best = 0.0;
  for (int restart = 0; restart < 10; ++restart) {
    FnnConfig cfg;
    cfg.hidden = hidden;
    cfg.restarts = 1;
    cfg.max_epochs = 5000;
    cfg.patience = 500;
    cfg.init_range = 2.0;
    cfg.learning_rate = 2.0;
    cfg.seed = static_cast<std::uint64_t>(restart);
    const FnnResult r = train_fnn(parts[0], parts[1], cfg);
    best = std::max(best, 1.0 - classification_error(
                                    [&](std::span<const double> x) { return predict_fnn(r.model, x).label; },
                                    parts[0]));
  }
  return best;
}

}  // namespace

TEST(Fnn, XorTwoHiddenUnits) { EXPECT_GE(best_xor_training_accuracy(2), 0.95); }

TEST(Fnn, XorFourHiddenUnits) { EXPECT_GE(best_xor_training_accuracy(4), 0.95); }

TEST(Fnn, ConfigValidation) {
  FnnConfig c;
  c.hidden = 0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
}
