#pragma once

// A compact interval-based forest: each tree sees summary statistics
// (mean, standard deviation, slope) of random intervals and is grown with
// CART. A lightweight stand-in for the Canonical Interval Forest, which uses
// catch22 statistics instead.

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "dyadfuse/core.hpp"
#include "dyadfuse/tree.hpp"

namespace dyadfuse::classify {

constexpr std::size_t kDefaultForestTrees = 100;

struct Interval {
  std::size_t channel = 0;
  std::size_t start = 0;
  std::size_t length = 3;
};

struct IntervalTree {
  std::vector<Interval> intervals;
  DecisionTree tree;  // over 3 features per interval: mean, sd, slope
};

struct IntervalForest {
  std::vector<IntervalTree> trees;
  std::uint64_t seed = 0;
  std::size_t timesteps = 0;
  std::size_t channels = 0;
};

/// floor(sqrt(T) * sqrt(C)), at least 1; each interval picks its own channel.
std::size_t intervals_per_tree(std::size_t timesteps, std::size_t channels);

/// [instances x 3*intervals]: mean, population sd and least-squares slope of
/// each interval.
Eigen::MatrixXd interval_features(const ModalityTensor& tensor,
                                  std::span<const Interval> intervals);

IntervalForest fit_interval_forest(const ModalityTensor& tensor,
                                   std::span<const ClassLabel> labels,
                                   std::size_t n_trees, std::uint64_t seed);

/// Mean of the per-tree leaf class frequencies.
ScoreMatrix forest_scores(const IntervalForest& forest,
                          const ModalityTensor& tensor);

}  // namespace dyadfuse::classify
