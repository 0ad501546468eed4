#pragma once

// CART decision tree (Gini impurity) for two classes.

#include <Eigen/Dense>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "dyadfuse/core.hpp"

namespace dyadfuse::classify {

constexpr std::size_t kUnlimitedDepth = std::numeric_limits<std::size_t>::max();

struct TreeNode {
  // feature < 0 marks a leaf. Rows with x[feature] <= threshold go left.
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  std::size_t depth = 0;
  std::array<std::size_t, kNumClasses> counts{0, 0};
  ClassScores scores{0.5, 0.5};  // class-weighted frequencies at this node

  bool is_leaf() const noexcept { return feature < 0; }
};

class DecisionTree {
 public:
  DecisionTree() = default;
  DecisionTree(std::vector<TreeNode> nodes, std::size_t max_depth,
               std::size_t num_features);

  const std::vector<TreeNode>& nodes() const noexcept { return nodes_; }
  std::size_t max_depth() const noexcept { return max_depth_; }
  std::size_t num_features() const noexcept { return num_features_; }
  /// Deepest node depth; the root has depth 0.
  std::size_t depth() const;

  const TreeNode& leaf_for(std::span<const double> row) const;
  ClassScores predict_scores(std::span<const double> row) const {
    return leaf_for(row).scores;
  }

 private:
  std::vector<TreeNode> nodes_;
  std::size_t max_depth_ = 0;
  std::size_t num_features_ = 0;
};

/// Grows a tree greedily. Classes are weighted inversely to their frequency
/// in y, so both classes carry equal total weight in impurities and leaf
/// scores. Candidate thresholds are midpoints of consecutive
/// distinct values within the node; the split with the lowest Gini
/// impurity wins, ties going to the lowest feature index and then the lowest
/// threshold. A node becomes a leaf when it is pure, at max_depth, or has no
/// candidate threshold.
DecisionTree fit_tree(const Eigen::MatrixXd& X, std::span<const ClassLabel> y,
                      std::size_t max_depth);

ScoreMatrix tree_scores(const DecisionTree& tree, const Eigen::MatrixXd& X);

}  // namespace dyadfuse::classify
