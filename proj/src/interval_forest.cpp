#include "dyadfuse/interval_forest.hpp"

#include <algorithm>
#include <cmath>

#include "dyadfuse/rng.hpp"

namespace dyadfuse::classify {

namespace {

// Running sums of x, x^2 and t*x for one series, with a leading zero.
struct PrefixSums {
  std::vector<double> s1, s2, st;

  explicit PrefixSums(std::span<const double> x)
      : s1(x.size() + 1, 0.0), s2(x.size() + 1, 0.0), st(x.size() + 1, 0.0) {
    for (std::size_t t = 0; t < x.size(); ++t) {
      s1[t + 1] = s1[t] + x[t];
      s2[t + 1] = s2[t] + x[t] * x[t];
      st[t + 1] = st[t] + static_cast<double>(t) * x[t];
    }
  }
};

void write_stats(const PrefixSums& p, const Interval& iv, double* out) {
  const std::size_t b = iv.start;
  const std::size_t e = iv.start + iv.length;
  const double L = static_cast<double>(iv.length);
  const double sum = p.s1[e] - p.s1[b];
  const double sum2 = p.s2[e] - p.s2[b];
  const double mean = sum / L;
  const double var = std::max(0.0, sum2 / L - mean * mean);
  // Slope against local time 0..L-1.
  const double local_tx = (p.st[e] - p.st[b]) - static_cast<double>(b) * sum;
  const double t_mean = (L - 1.0) / 2.0;
  const double t_ss = L * (L * L - 1.0) / 12.0;
  out[0] = mean;
  out[1] = std::sqrt(var);
  out[2] = (local_tx - t_mean * sum) / t_ss;
}

std::vector<std::vector<PrefixSums>> prefix_sums(const ModalityTensor& tensor) {
  std::vector<std::vector<PrefixSums>> out(tensor.instances());
  for (std::size_t i = 0; i < tensor.instances(); ++i) {
    out[i].reserve(tensor.channels());
    for (std::size_t c = 0; c < tensor.channels(); ++c) {
      out[i].emplace_back(tensor.series(i, c));
    }
  }
  return out;
}

Eigen::MatrixXd features_from_sums(
    const std::vector<std::vector<PrefixSums>>& sums,
    std::span<const Interval> intervals) {
  Eigen::MatrixXd X(static_cast<Eigen::Index>(sums.size()),
                    static_cast<Eigen::Index>(3 * intervals.size()));
  double stats[3];
  for (std::size_t i = 0; i < sums.size(); ++i) {
    for (std::size_t k = 0; k < intervals.size(); ++k) {
      write_stats(sums[i][intervals[k].channel], intervals[k], stats);
      for (std::size_t s = 0; s < 3; ++s) {
        X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(3 * k + s)) =
            stats[s];
      }
    }
  }
  return X;
}

void check_shape(const ModalityTensor& tensor) {
  if (tensor.timesteps() < 3) {
    throw Error(ErrorKind::SeriesTooShort,
                "interval forest needs at least 3 timesteps");
  }
}

}  // namespace

std::size_t intervals_per_tree(std::size_t timesteps, std::size_t channels) {
  const double k = std::floor(std::sqrt(static_cast<double>(timesteps)) *
                              std::sqrt(static_cast<double>(channels)));
  return std::max<std::size_t>(1, static_cast<std::size_t>(k));
}

Eigen::MatrixXd interval_features(const ModalityTensor& tensor,
                                  std::span<const Interval> intervals) {
  check_shape(tensor);
  for (const auto& iv : intervals) {
    if (iv.channel >= tensor.channels() || iv.length < 2 ||
        iv.start + iv.length > tensor.timesteps()) {
      throw Error(ErrorKind::ShapeMismatch, "interval outside the tensor");
    }
  }
  return features_from_sums(prefix_sums(tensor), intervals);
}

IntervalForest fit_interval_forest(const ModalityTensor& tensor,
                                   std::span<const ClassLabel> labels,
                                   std::size_t n_trees, std::uint64_t seed) {
  check_shape(tensor);
  if (labels.size() != tensor.instances()) {
    throw Error(ErrorKind::ShapeMismatch, "labels and instances differ");
  }
  const std::size_t T = tensor.timesteps();
  const std::size_t max_length = std::min(T, std::max<std::size_t>(3, T / 2));
  const std::size_t count = intervals_per_tree(T, tensor.channels());
  const auto sums = prefix_sums(tensor);

  IntervalForest forest;
  forest.seed = seed;
  forest.timesteps = T;
  forest.channels = tensor.channels();
  forest.trees.reserve(n_trees);
  for (std::size_t t = 0; t < n_trees; ++t) {
    Rng rng(derive_seed(seed, t));
    IntervalTree member;
    member.intervals.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
      Interval iv;
      iv.channel = rng.index(tensor.channels());
      iv.length = 3 + rng.index(max_length - 3 + 1);
      iv.start = rng.index(T - iv.length + 1);
      member.intervals.push_back(iv);
    }
    const Eigen::MatrixXd X = features_from_sums(sums, member.intervals);
    member.tree = fit_tree(X, labels, kUnlimitedDepth);
    forest.trees.push_back(std::move(member));
  }
  return forest;
}

ScoreMatrix forest_scores(const IntervalForest& forest,
                          const ModalityTensor& tensor) {
  check_shape(tensor);
  if (tensor.timesteps() != forest.timesteps ||
      tensor.channels() != forest.channels) {
    throw Error(ErrorKind::ShapeMismatch,
                "forest fitted on a different series shape");
  }
  ScoreMatrix out;
  out.source = "interval_forest";
  out.rows.assign(tensor.instances(), {0.0, 0.0});
  if (forest.trees.empty()) {
    out.rows.assign(tensor.instances(), {0.5, 0.5});
    return out;
  }
  const auto sums = prefix_sums(tensor);
  for (const auto& member : forest.trees) {
    const ScoreMatrix s =
        tree_scores(member.tree, features_from_sums(sums, member.intervals));
    for (std::size_t i = 0; i < out.rows.size(); ++i) {
      out.rows[i][0] += s.rows[i][0];
      out.rows[i][1] += s.rows[i][1];
    }
  }
  const double n = static_cast<double>(forest.trees.size());
  for (auto& row : out.rows) {
    row[0] /= n;
    row[1] /= n;
  }
  return out;
}

}  // namespace dyadfuse::classify
