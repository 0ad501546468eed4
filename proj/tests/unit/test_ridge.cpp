#include <doctest.h>

#include <cmath>

#include "dyadfuse/model_io.hpp"
#include "dyadfuse/ridge.hpp"
#include "dyadfuse/rng.hpp"
#include "oracles.hpp"

using namespace dyadfuse;
using namespace dyadfuse::classify;

TEST_CASE("targets encode Lie as -1") {
  const std::vector<ClassLabel> y = {ClassLabel::Lie, ClassLabel::Truth};
  const auto t = encode_targets(y);
  CHECK(t(0) == -1.0);
  CHECK(t(1) == 1.0);
  CHECK(default_alpha_grid() ==
        std::vector<double>{1e-3, 1e-2, 1e-1, 1.0, 1e1, 1e2, 1e3});
}

TEST_CASE("three-point system solved by hand") {
  // x = (0, 1, 2), y = (-1, -1, 1), alpha = 1, unit weights: centered
  // x = (-1, 0, 1), w = 2 / (2 + 1), b = mean(y) - mean(x) w = -1.
  Eigen::MatrixXd X(3, 1);
  X << 0.0, 1.0, 2.0;
  Eigen::VectorXd y(3);
  y << -1.0, -1.0, 1.0;
  const auto s = solve_ridge(X, y, 1.0);
  CHECK(std::abs(s.weights(0) - 2.0 / 3.0) < 1e-12);
  CHECK(std::abs(s.intercept + 1.0) < 1e-12);
}

TEST_CASE("balanced weights on the three-point system solved by hand") {
  // Standardized z = (-s, 0, s), s = sqrt(3/2), class weights (3/4, 3/4, 3/2).
  // Normal equations: 4.375 w + 0.75 s b = 2.25 s and 0.75 s w + 3 b = 0,
  // so w = 72 s / 131 and b = -27 / 131.
  const std::vector<ClassLabel> y = {ClassLabel::Lie, ClassLabel::Lie, ClassLabel::Truth};
  const auto w = balanced_sample_weights(y);
  CHECK(w(0) == 0.75);
  CHECK(w(2) == 1.5);
  Eigen::MatrixXd X(3, 1);
  X << 0.0, 1.0, 2.0;
  const double alpha[] = {1.0};
  const auto m = fit_ridge(X, y, alpha);
  CHECK(std::abs(m.weights(0) - 72.0 * std::sqrt(1.5) / 131.0) < 1e-12);
  CHECK(std::abs(m.intercept + 27.0 / 131.0) < 1e-12);
  CHECK(m.mean(0) == 1.0);
  CHECK(std::abs(m.scale(0) - std::sqrt(2.0 / 3.0)) < 1e-15);
  const auto d = ridge_decision(m, X);
  CHECK(std::abs(d(2) - 81.0 / 131.0) < 1e-12);
}

TEST_CASE("balanced weights give each class half the total weight") {
  const std::vector<ClassLabel> y = {ClassLabel::Truth, ClassLabel::Lie, ClassLabel::Truth,
                                     ClassLabel::Truth, ClassLabel::Lie};
  const auto w = balanced_sample_weights(y);
  CHECK(std::abs(w(1) + w(4) - 2.5) < 1e-15);
  CHECK(std::abs(w(0) + w(2) + w(3) - 2.5) < 1e-15);
  const std::vector<ClassLabel> one = {ClassLabel::Lie, ClassLabel::Lie};
  CHECK(balanced_sample_weights(one) == Eigen::VectorXd::Ones(2));
}

TEST_CASE("closed-form LOO residuals equal explicit refits") {
  Rng rng(12);
  for (int trial = 0; trial < 30; ++trial) {
    const Eigen::Index n = 3 + static_cast<Eigen::Index>(rng.index(6));
    const Eigen::Index p = 1 + static_cast<Eigen::Index>(rng.index(12));
    Eigen::MatrixXd X(n, p);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < p; ++j) X(i, j) = rng.normal();
      y(i) = rng.coin() ? 1.0 : -1.0;
    }
    const auto alphas = default_alpha_grid();
    const auto R = loo_residuals(X, y, alphas);
    for (std::size_t a = 0; a < alphas.size(); ++a) {
      for (Eigen::Index i = 0; i < n; ++i) {
        CHECK(std::abs(R(i, a) - oracle::refit_residual(X, y, alphas[a], i)) < 1e-6);
      }
    }
  }
}

TEST_CASE("weighted closed-form LOO residuals equal weighted refits") {
  Rng rng(13);
  for (int trial = 0; trial < 30; ++trial) {
    const Eigen::Index n = 3 + static_cast<Eigen::Index>(rng.index(6));
    const Eigen::Index p = 1 + static_cast<Eigen::Index>(rng.index(12));
    Eigen::MatrixXd X(n, p);
    Eigen::VectorXd y(n);
    Eigen::VectorXd w(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < p; ++j) X(i, j) = rng.normal();
      y(i) = rng.coin() ? 1.0 : -1.0;
      w(i) = rng.uniform(0.2, 3.0);
    }
    const auto alphas = default_alpha_grid();
    const auto R = loo_residuals(X, y, alphas, w);
    for (std::size_t a = 0; a < alphas.size(); ++a) {
      for (Eigen::Index i = 0; i < n; ++i) {
        CHECK(std::abs(R(i, a) - oracle::refit_residual(X, y, alphas[a], i, w)) < 1e-6);
      }
    }
  }
}

TEST_CASE("fit_ridge picks the alpha with the smallest LOO error") {
  Rng rng(5);
  Eigen::MatrixXd X(10, 4);
  std::vector<ClassLabel> y;
  for (Eigen::Index i = 0; i < 10; ++i) {
    y.push_back(i < 5 ? ClassLabel::Lie : ClassLabel::Truth);
    for (Eigen::Index j = 0; j < 4; ++j) X(i, j) = rng.normal() + (i < 5 ? -1.0 : 1.0);
  }
  const auto alphas = default_alpha_grid();
  const auto m = fit_ridge(X, y, alphas);
  Eigen::MatrixXd Z(10, 4);
  for (Eigen::Index j = 0; j < 4; ++j) {
    Z.col(j) = (X.col(j).array() - m.mean(j)) / m.scale(j);
  }
  // Balanced classes: unit weights.
  const auto R = loo_residuals(Z, encode_targets(y), alphas);
  Eigen::Index best = 0;
  R.colwise().squaredNorm().minCoeff(&best);
  CHECK(m.alpha == alphas[static_cast<std::size_t>(best)]);
  CHECK(std::abs(m.loo_error - R.col(best).squaredNorm() / 10.0) < 1e-12);
}

TEST_CASE("constant columns are dropped") {
  Eigen::MatrixXd X(4, 3);
  X << 1, 5, 0, 1, 5, 1, 1, 5, 2, 1, 5, 3;
  const std::vector<ClassLabel> y = {ClassLabel::Lie, ClassLabel::Lie,
                                     ClassLabel::Truth, ClassLabel::Truth};
  const auto m = fit_ridge(X, y, default_alpha_grid());
  CHECK(m.kept_columns == std::vector<std::size_t>{2});
  CHECK(m.input_width == 3);
  const auto s = ridge_scores(m, X);
  CHECK(rows_are_distributions(s));
  CHECK(s.argmax(0) == ClassLabel::Lie);
  CHECK(s.argmax(3) == ClassLabel::Truth);
}

TEST_CASE("ridge errors") {
  Eigen::MatrixXd X(3, 1);
  X << 1, 2, 3;
  const std::vector<ClassLabel> one = {ClassLabel::Lie, ClassLabel::Lie, ClassLabel::Lie};
  try {
    fit_ridge(X, one, default_alpha_grid());
    FAIL("expected SingleClassTraining");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::SingleClassTraining);
  }
  const std::vector<ClassLabel> two = {ClassLabel::Lie, ClassLabel::Truth, ClassLabel::Lie};
  const auto m = fit_ridge(X, two, default_alpha_grid());
  CHECK_THROWS_AS(ridge_decision(m, Eigen::MatrixXd(1, 2)), Error);
}

TEST_CASE("logistic scores are symmetric distributions") {
  CHECK(logistic(0.0) == 0.5);
  CHECK(std::abs(logistic(2.0) + logistic(-2.0) - 1.0) < 1e-15);
  CHECK(logistic(800.0) == 1.0);
  CHECK(logistic(-800.0) == 0.0);
}

TEST_CASE("ridge models round-trip through JSON") {
  Eigen::MatrixXd X(4, 2);
  X << 0.1, 2, 0.4, 1, 0.9, 7, 0.3, 3;
  const std::vector<ClassLabel> y = {ClassLabel::Lie, ClassLabel::Truth,
                                     ClassLabel::Truth, ClassLabel::Lie};
  const auto m = fit_ridge(X, y, default_alpha_grid());
  const auto back = ridge_from_json(nlohmann::json::parse(to_json(m).dump()));
  CHECK(ridge_decision(back, X) == ridge_decision(m, X));
}
