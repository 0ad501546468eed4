#include "dyadfuse/ridge.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dyadfuse::classify {

std::vector<double> default_alpha_grid() {
  return {1e-3, 1e-2, 1e-1, 1.0, 1e1, 1e2, 1e3};
}

Eigen::VectorXd encode_targets(std::span<const ClassLabel> labels) {
  Eigen::VectorXd y(static_cast<Eigen::Index>(labels.size()));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    y(static_cast<Eigen::Index>(i)) = labels[i] == ClassLabel::Truth ? 1.0 : -1.0;
  }
  return y;
}

Eigen::VectorXd balanced_sample_weights(std::span<const ClassLabel> labels) {
  const auto n = static_cast<Eigen::Index>(labels.size());
  const auto lie = static_cast<double>(
      std::count(labels.begin(), labels.end(), ClassLabel::Lie));
  const double truth = static_cast<double>(n) - lie;
  Eigen::VectorXd w = Eigen::VectorXd::Ones(n);
  if (lie == 0.0 || truth == 0.0) return w;
  for (Eigen::Index i = 0; i < n; ++i) {
    w(i) = static_cast<double>(n) /
           (2.0 * (labels[static_cast<std::size_t>(i)] == ClassLabel::Lie
                       ? lie
                       : truth));
  }
  return w;
}

namespace {

// Rows scaled by sqrt(w) after weighted centering; the intercept then drops
// out of the penalized problem.
struct Centered {
  Eigen::VectorXd weights;
  Eigen::VectorXd root;
  Eigen::RowVectorXd x_mean;
  double y_mean = 0.0;
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
};

Centered center(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                const Eigen::VectorXd& sample_weights) {
  Centered c;
  c.weights = sample_weights.size() == 0
                  ? Eigen::VectorXd::Ones(X.rows())
                  : sample_weights;
  if (c.weights.size() != X.rows() || (c.weights.array() <= 0.0).any()) {
    throw Error(ErrorKind::ShapeMismatch,
                "ridge sample weights must be positive, one per row");
  }
  const double total = c.weights.sum();
  c.root = c.weights.array().sqrt();
  c.x_mean = (c.weights.transpose() * X) / total;
  c.y_mean = c.weights.dot(y) / total;
  c.X = c.root.asDiagonal() * (X.rowwise() - c.x_mean);
  c.y = c.root.array() * (y.array() - c.y_mean);
  return c;
}

}  // namespace

RidgeSolution solve_ridge(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                          double alpha, const Eigen::VectorXd& sample_weights) {
  if (X.rows() != y.size() || X.rows() == 0) {
    throw Error(ErrorKind::ShapeMismatch, "ridge system has mismatched rows");
  }
  const Centered c = center(X, y, sample_weights);
  Eigen::MatrixXd gram = c.X * c.X.transpose();
  gram.diagonal().array() += alpha;
  const Eigen::VectorXd dual = gram.ldlt().solve(c.y);
  RidgeSolution out;
  out.weights = c.X.transpose() * dual;
  out.intercept = c.y_mean - c.x_mean.dot(out.weights);
  return out;
}

Eigen::MatrixXd loo_residuals(const Eigen::MatrixXd& X,
                              const Eigen::VectorXd& y,
                              std::span<const double> alphas,
                              const Eigen::VectorXd& sample_weights) {
  const Eigen::Index n = X.rows();
  if (y.size() != n || n < 2) {
    throw Error(ErrorKind::ShapeMismatch, "LOO needs at least two rows");
  }
  const Centered c = center(X, y, sample_weights);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(c.X *
                                                           c.X.transpose());
  // Eigenvalues below numerical rank are exact zeros (the intercept
  // direction at least); their noise would otherwise be amplified by 1/alpha.
  Eigen::VectorXd lambda = eig.eigenvalues();
  const double tolerance = static_cast<double>(n) *
                           std::numeric_limits<double>::epsilon() *
                           std::max(lambda.maxCoeff(), 0.0);
  for (double& l : lambda) {
    if (l <= tolerance) l = 0.0;
  }
  const Eigen::MatrixXd& U = eig.eigenvectors();
  const Eigen::VectorXd projected = U.transpose() * c.y;
  const Eigen::MatrixXd U2 = U.array().square();
  const Eigen::VectorXd intercept_leverage = c.weights / c.weights.sum();

  // Residual and 1 - H_ii in their complementary forms, sum_k U_ik^2 = 1,
  // which avoid cancellation when the fit nearly interpolates.
  Eigen::MatrixXd residuals(n, static_cast<Eigen::Index>(alphas.size()));
  for (std::size_t a = 0; a < alphas.size(); ++a) {
    const Eigen::VectorXd keep = alphas[a] / (lambda.array() + alphas[a]);
    const Eigen::VectorXd residual =
        U * (keep.array() * projected.array()).matrix();
    const Eigen::VectorXd complement = U2 * keep - intercept_leverage;
    residuals.col(static_cast<Eigen::Index>(a)) =
        residual.array() / c.root.array() / complement.array();
  }
  return residuals;
}

RidgeModel fit_ridge(const FeatureMatrix& features,
                     std::span<const ClassLabel> labels,
                     std::span<const double> alphas) {
  const Eigen::Index n = features.rows();
  if (static_cast<std::size_t>(n) != labels.size()) {
    throw Error(ErrorKind::ShapeMismatch, "feature rows and labels differ");
  }
  if (alphas.empty()) {
    throw Error(ErrorKind::ConfigParse, "empty alpha grid");
  }
  const bool has_lie =
      std::find(labels.begin(), labels.end(), ClassLabel::Lie) != labels.end();
  const bool has_truth = std::find(labels.begin(), labels.end(),
                                   ClassLabel::Truth) != labels.end();
  if (n < 2 || !has_lie || !has_truth) {
    throw Error(ErrorKind::SingleClassTraining,
                "ridge training needs both classes");
  }

  RidgeModel model;
  model.input_width = static_cast<std::size_t>(features.cols());
  for (Eigen::Index c = 0; c < features.cols(); ++c) {
    if (features.col(c).maxCoeff() > features.col(c).minCoeff()) {
      model.kept_columns.push_back(static_cast<std::size_t>(c));
    }
  }
  const auto p = static_cast<Eigen::Index>(model.kept_columns.size());
  Eigen::MatrixXd X(n, p);
  model.mean.resize(p);
  model.scale.resize(p);
  for (Eigen::Index k = 0; k < p; ++k) {
    const auto col =
        features.col(static_cast<Eigen::Index>(model.kept_columns[k]));
    const double mean = col.mean();
    const double sd =
        std::sqrt((col.array() - mean).square().sum() / static_cast<double>(n));
    model.mean(k) = mean;
    model.scale(k) = sd;
    X.col(k) = (col.array() - mean) / sd;
  }
  const Eigen::VectorXd y = encode_targets(labels);
  const Eigen::VectorXd w = balanced_sample_weights(labels);

  if (p == 0) {
    model.weights = Eigen::VectorXd();
    model.intercept = w.dot(y) / w.sum();
    model.alpha = alphas.front();
    model.loo_error = 0.0;
    return model;
  }

  const Eigen::MatrixXd residuals = loo_residuals(X, y, alphas, w);
  double best = std::numeric_limits<double>::infinity();
  std::size_t best_index = 0;
  for (std::size_t a = 0; a < alphas.size(); ++a) {
    const double err =
        w.dot(residuals.col(static_cast<Eigen::Index>(a)).cwiseAbs2()) /
        w.sum();
    if (err < best) {
      best = err;
      best_index = a;
    }
  }
  model.alpha = alphas[best_index];
  model.loo_error = best;
  const auto solution = solve_ridge(X, y, model.alpha, w);
  model.weights = solution.weights;
  model.intercept = solution.intercept;
  return model;
}

Eigen::VectorXd ridge_decision(const RidgeModel& model,
                               const FeatureMatrix& features) {
  if (static_cast<std::size_t>(features.cols()) != model.input_width) {
    throw Error(ErrorKind::ShapeMismatch,
                "model expects " + std::to_string(model.input_width) +
                    " features, got " + std::to_string(features.cols()));
  }
  Eigen::VectorXd d =
      Eigen::VectorXd::Constant(features.rows(), model.intercept);
  for (std::size_t k = 0; k < model.kept_columns.size(); ++k) {
    const auto kk = static_cast<Eigen::Index>(k);
    d += model.weights(kk) *
         ((features.col(static_cast<Eigen::Index>(model.kept_columns[k]))
               .array() -
           model.mean(kk)) /
          model.scale(kk))
             .matrix();
  }
  return d;
}

double logistic(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

ScoreMatrix ridge_scores(const RidgeModel& model,
                         const FeatureMatrix& features) {
  const Eigen::VectorXd d = ridge_decision(model, features);
  ScoreMatrix out;
  out.source = "ridge";
  out.rows.reserve(static_cast<std::size_t>(d.size()));
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    const double truth = logistic(d(i));
    out.rows.push_back({1.0 - truth, truth});
  }
  return out;
}

}  // namespace dyadfuse::classify
