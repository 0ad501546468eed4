#pragma once

// Ridge classifier with closed-form leave-one-out selection of the
// regularization strength.

#include <Eigen/Dense>
#include <cstddef>
#include <span>
#include <vector>

#include "dyadfuse/core.hpp"
#include "dyadfuse/rocket.hpp"

namespace dyadfuse::classify {

/// {1e-3, 1e-2, ..., 1e3}.
std::vector<double> default_alpha_grid();

/// Lie -> -1, Truth -> +1.
Eigen::VectorXd encode_targets(std::span<const ClassLabel> labels);

/// Per-row weights n / (2 n_class), so each class carries half the total
/// weight. Single-class input gets unit weights.
Eigen::VectorXd balanced_sample_weights(std::span<const ClassLabel> labels);

/// Weighted least squares with an unpenalized intercept and an L2 penalty
/// `alpha` on the weights, solved through the n x n Gram matrix. Empty
/// `sample_weights` means unit weights.
struct RidgeSolution {
  Eigen::VectorXd weights;
  double intercept = 0.0;
};

RidgeSolution solve_ridge(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                          double alpha,
                          const Eigen::VectorXd& sample_weights = {});

/// Leave-one-out residuals y_i - f_{-i}(x_i) for every alpha in the grid,
/// computed from a single eigendecomposition via e_i / (1 - H_ii). Sample
/// weights are held fixed when a row is left out. Column a corresponds to
/// alphas[a].
Eigen::MatrixXd loo_residuals(const Eigen::MatrixXd& X,
                              const Eigen::VectorXd& y,
                              std::span<const double> alphas,
                              const Eigen::VectorXd& sample_weights = {});

struct RidgeModel {
  std::size_t input_width = 0;
  // Columns of the input that survived the constant-column filter, with the
  // training mean and population standard deviation of each.
  std::vector<std::size_t> kept_columns;
  Eigen::VectorXd mean;
  Eigen::VectorXd scale;
  Eigen::VectorXd weights;  // over standardized kept columns
  double intercept = 0.0;
  double alpha = 1.0;
  double loo_error = 0.0;  // weighted mean squared LOO residual at `alpha`
};

/// Standardizes columns on the training rows, drops constant columns, and
/// fits with balanced class weights, picking the alpha with the smallest
/// weighted mean squared LOO residual (first on ties).
RidgeModel fit_ridge(const FeatureMatrix& features,
                     std::span<const ClassLabel> labels,
                     std::span<const double> alphas);

/// Signed margin; positive favours Truth.
Eigen::VectorXd ridge_decision(const RidgeModel& model,
                               const FeatureMatrix& features);

double logistic(double x);

/// Maps each margin d to (1 - s, s) with s = logistic(d).
ScoreMatrix ridge_scores(const RidgeModel& model,
                         const FeatureMatrix& features);

}  // namespace dyadfuse::classify
