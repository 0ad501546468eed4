#pragma once

// Independent reference implementations used by the unit and acceptance
// tests. They favour the most literal formulation over speed.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "dyadfuse/core.hpp"
#include "dyadfuse/rng.hpp"
#include "dyadfuse/rocket.hpp"

namespace oracle {

using dyadfuse::ClassLabel;

// Fragment k of a length-n series cut into m pieces covers
// [round(k*n/m), round((k+1)*n/m)), halves rounded up.
inline std::size_t boundary(std::size_t k, std::size_t n, std::size_t m) {
  return static_cast<std::size_t>(
      std::floor(static_cast<double>(k) * static_cast<double>(n) /
                     static_cast<double>(m) +
                 0.5));
}

inline std::vector<double> paa(const std::vector<double>& x, std::size_t m) {
  std::vector<double> out;
  for (std::size_t k = 0; k < m; ++k) {
    const std::size_t a = boundary(k, x.size(), m);
    const std::size_t b = boundary(k + 1, x.size(), m);
    double sum = 0.0;
    for (std::size_t t = a; t < b; ++t) sum += x[t];
    out.push_back(sum / static_cast<double>(b - a));
  }
  return out;
}

// Equal-width binning of [min, max] of the raw series into v symbols; each
// segment mean is replaced by the centre of the bin it falls in.
inline std::vector<double> sax(const std::vector<double>& x, std::size_t m,
                               std::size_t v) {
  const double lo = *std::min_element(x.begin(), x.end());
  const double hi = *std::max_element(x.begin(), x.end());
  std::vector<double> out = paa(x, m);
  if (hi == lo) {
    std::fill(out.begin(), out.end(), lo);
    return out;
  }
  const double width = (hi - lo) / static_cast<double>(v);
  for (double& value : out) {
    std::size_t bin = 0;
    for (std::size_t j = 1; j < v; ++j) {
      if (value >= lo + width * static_cast<double>(j)) bin = j;
    }
    value = lo + width * (static_cast<double>(bin) + 0.5);
  }
  return out;
}

struct Pooled {
  double ppv;
  double max;
};

// Literal dilated convolution over an explicitly zero-padded copy of every
// channel in the kernel's subset.
inline Pooled convolve(const dyadfuse::classify::RocketKernel& kernel,
                       const dyadfuse::ModalityTensor& tensor,
                       std::size_t instance) {
  const std::size_t T = tensor.timesteps();
  const std::size_t pad =
      kernel.padded ? (kernel.length - 1) * kernel.dilation / 2 : 0;
  std::vector<std::vector<double>> padded;
  for (std::size_t c : kernel.channel_subset) {
    std::vector<double> row(T + 2 * pad, 0.0);
    for (std::size_t t = 0; t < T; ++t) row[pad + t] = tensor.at(instance, c, t);
    padded.push_back(std::move(row));
  }
  const std::size_t reach = (kernel.length - 1) * kernel.dilation;
  const std::size_t outputs = T + 2 * pad - reach;
  std::size_t positive = 0;
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t o = 0; o < outputs; ++o) {
    double sum = kernel.bias;
    for (std::size_t s = 0; s < padded.size(); ++s) {
      for (std::size_t j = 0; j < kernel.length; ++j) {
        sum += kernel.weights[s * kernel.length + j] *
               padded[s][o + j * kernel.dilation];
      }
    }
    if (sum > 0.0) ++positive;
    best = std::max(best, sum);
  }
  return {static_cast<double>(positive) / static_cast<double>(outputs), best};
}

// Weighted ridge with an unpenalized intercept, solved in primal form on the
// rows of X other than `skip`, evaluated at row `skip`. Empty weights mean
// unit weights.
inline double refit_prediction(const Eigen::MatrixXd& X,
                               const Eigen::VectorXd& y, double alpha,
                               Eigen::Index skip,
                               const Eigen::VectorXd& weights = {}) {
  const Eigen::Index n = X.rows();
  const Eigen::Index p = X.cols();
  Eigen::MatrixXd A(n - 1, p + 1);
  Eigen::VectorXd b(n - 1);
  Eigen::VectorXd w(n - 1);
  for (Eigen::Index i = 0, r = 0; i < n; ++i) {
    if (i == skip) continue;
    A.row(r).head(p) = X.row(i);
    A(r, p) = 1.0;
    b(r) = y(i);
    w(r) = weights.size() == 0 ? 1.0 : weights(i);
    ++r;
  }
  Eigen::MatrixXd normal = A.transpose() * w.asDiagonal() * A;
  for (Eigen::Index j = 0; j < p; ++j) normal(j, j) += alpha;
  const Eigen::VectorXd beta =
      normal.fullPivLu().solve(A.transpose() * w.asDiagonal() * b);
  return X.row(skip).dot(beta.head(p)) + beta(p);
}

inline double refit_residual(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                             double alpha, Eigen::Index skip,
                             const Eigen::VectorXd& weights = {}) {
  return y(skip) - refit_prediction(X, y, alpha, skip, weights);
}

struct Split {
  int feature = -1;
  double threshold = 0.0;
  double impurity = std::numeric_limits<double>::infinity();
};

inline double gini(double lie, double truth) {
  const double n = lie + truth;
  if (n == 0) return 0.0;
  const double a = lie / n;
  const double b = truth / n;
  return 1.0 - a * a - b * b;
}

// Tries every midpoint of every feature with each class weighted by
// n / (2 n_class); lowest weighted Gini wins, ties to the lower feature and
// then the lower threshold.
inline Split best_split(const Eigen::MatrixXd& X,
                        const std::vector<ClassLabel>& y) {
  Split best;
  const std::size_t n = y.size();
  const auto lies = static_cast<double>(std::count(y.begin(), y.end(), ClassLabel::Lie));
  const double truths = static_cast<double>(n) - lies;
  const bool mixed = lies > 0 && truths > 0;
  const double wl = mixed ? static_cast<double>(n) / (2.0 * lies) : 1.0;
  const double wt = mixed ? static_cast<double>(n) / (2.0 * truths) : 1.0;
  for (Eigen::Index f = 0; f < X.cols(); ++f) {
    std::vector<double> values(X.col(f).data(), X.col(f).data() + n);
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    for (std::size_t k = 0; k + 1 < values.size(); ++k) {
      const double threshold = 0.5 * (values[k] + values[k + 1]);
      std::size_t ll = 0, lt = 0, rl = 0, rt = 0;
      for (std::size_t i = 0; i < n; ++i) {
        const bool left = X(static_cast<Eigen::Index>(i), f) <= threshold;
        const bool lie = y[i] == ClassLabel::Lie;
        (left ? (lie ? ll : lt) : (lie ? rl : rt))++;
      }
      const double left_l = wl * static_cast<double>(ll);
      const double left_t = wt * static_cast<double>(lt);
      const double right_l = wl * static_cast<double>(rl);
      const double right_t = wt * static_cast<double>(rt);
      const double impurity = ((left_l + left_t) * gini(left_l, left_t) +
                               (right_l + right_t) * gini(right_l, right_t)) /
                              static_cast<double>(n);
      if (impurity < best.impurity - 1e-12) {
        best = {static_cast<int>(f), threshold, impurity};
      }
    }
  }
  return best;
}

// Rates of a confusion matrix with Lie as the positive class.
struct Rates {
  double precision_lie, precision_truth, recall_lie, recall_truth, accuracy;
};

inline Rates rates(double tp, double fn, double fp, double tn) {
  return {tp / (tp + fp), tn / (tn + fn), tp / (tp + fn), tn / (tn + fp),
          (tp + tn) / (tp + fn + fp + tn)};
}

}  // namespace oracle

namespace fixtures {

using dyadfuse::ClassLabel;

// Tensor filled with standard normal draws.
inline dyadfuse::ModalityTensor random_tensor(std::size_t instances,
                                              std::size_t channels,
                                              std::size_t timesteps,
                                              std::uint64_t seed,
                                              const std::string& name = "x") {
  dyadfuse::Rng rng(seed);
  std::vector<double> data(instances * channels * timesteps);
  for (double& v : data) v = rng.normal();
  std::vector<std::string> names;
  for (std::size_t c = 0; c < channels; ++c) {
    names.push_back("sender/c" + std::to_string(c));
  }
  return dyadfuse::ModalityTensor(name, instances, std::move(names), timesteps,
                                  std::move(data), 1.0);
}

inline dyadfuse::ScoreMatrix score_rows(const std::vector<double>& lie_scores) {
  dyadfuse::ScoreMatrix m;
  for (double s : lie_scores) m.rows.push_back({s, 1.0 - s});
  return m;
}

inline std::vector<ClassLabel> alternating_labels(std::size_t n) {
  std::vector<ClassLabel> labels;
  for (std::size_t i = 0; i < n; ++i) {
    labels.push_back(i % 2 == 0 ? ClassLabel::Lie : ClassLabel::Truth);
  }
  return labels;
}

}  // namespace fixtures
