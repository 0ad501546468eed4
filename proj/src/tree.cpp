#include "dyadfuse/tree.hpp"

#include <algorithm>
#include <numeric>

namespace dyadfuse::classify {

DecisionTree::DecisionTree(std::vector<TreeNode> nodes, std::size_t max_depth,
                           std::size_t num_features)
    : nodes_(std::move(nodes)),
      max_depth_(max_depth),
      num_features_(num_features) {}

std::size_t DecisionTree::depth() const {
  std::size_t d = 0;
  for (const auto& node : nodes_) d = std::max(d, node.depth);
  return d;
}

const TreeNode& DecisionTree::leaf_for(std::span<const double> row) const {
  if (row.size() != num_features_) {
    throw Error(ErrorKind::ShapeMismatch,
                "tree expects " + std::to_string(num_features_) +
                    " features, got " + std::to_string(row.size()));
  }
  const TreeNode* node = &nodes_.front();
  while (!node->is_leaf()) {
    node = row[static_cast<std::size_t>(node->feature)] <= node->threshold
               ? &nodes_[static_cast<std::size_t>(node->left)]
               : &nodes_[static_cast<std::size_t>(node->right)];
  }
  return *node;
}

namespace {

using Wide = unsigned __int128;

// Split quality as the exact fraction sum_child(sum_class count^2) / n_child,
// i.e. (n - weighted Gini * n); larger is better.
struct SplitScore {
  Wide numerator = 0;
  Wide denominator = 1;

  bool better_than(const SplitScore& other) const {
    return numerator * other.denominator > other.numerator * denominator;
  }
};

// Class weights proportional to n / (2 n_class), kept integral: a Lie row
// weighs n_truth and a Truth row n_lie. Single-class data is unweighted.
struct ClassWeights {
  Wide lie = 1;
  Wide truth = 1;
};

ClassWeights balanced_weights(std::span<const ClassLabel> y) {
  const auto lie =
      static_cast<std::size_t>(std::count(y.begin(), y.end(), ClassLabel::Lie));
  const std::size_t truth = y.size() - lie;
  if (lie == 0 || truth == 0) return {};
  return {truth, lie};
}

SplitScore score_split(const ClassWeights& w, std::size_t left_lie,
                       std::size_t left_truth, std::size_t right_lie,
                       std::size_t right_truth) {
  const Wide ll = w.lie * left_lie, lt = w.truth * left_truth;
  const Wide rl = w.lie * right_lie, rt = w.truth * right_truth;
  const Wide nl = ll + lt;
  const Wide nr = rl + rt;
  return {(ll * ll + lt * lt) * nr + (rl * rl + rt * rt) * nl, nl * nr};
}

class Builder {
 public:
  Builder(const Eigen::MatrixXd& X, std::span<const ClassLabel> y,
          std::size_t max_depth)
      : X_(X), y_(y), max_depth_(max_depth), weights_(balanced_weights(y)) {}

  std::vector<TreeNode> build() {
    std::vector<std::size_t> rows(static_cast<std::size_t>(X_.rows()));
    std::iota(rows.begin(), rows.end(), 0);
    grow(rows, 0);
    return std::move(nodes_);
  }

 private:
  int grow(std::vector<std::size_t>& rows, std::size_t depth) {
    TreeNode node;
    node.depth = depth;
    for (std::size_t r : rows) ++node.counts[class_index(y_[r])];
    const double lie = static_cast<double>(weights_.lie * node.counts[0]);
    const double truth = static_cast<double>(weights_.truth * node.counts[1]);
    node.scores = {lie / (lie + truth), truth / (lie + truth)};
    const int id = static_cast<int>(nodes_.size());
    nodes_.push_back(node);

    const bool pure = node.counts[0] == 0 || node.counts[1] == 0;
    if (pure || depth >= max_depth_) return id;

    int best_feature = -1;
    double best_threshold = 0.0;
    SplitScore best;
    std::vector<std::size_t> order = rows;
    for (Eigen::Index f = 0; f < X_.cols(); ++f) {
      std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return X_(static_cast<Eigen::Index>(a), f) <
               X_(static_cast<Eigen::Index>(b), f);
      });
      std::size_t left_lie = 0, left_truth = 0;
      for (std::size_t k = 0; k + 1 < order.size(); ++k) {
        if (y_[order[k]] == ClassLabel::Lie) {
          ++left_lie;
        } else {
          ++left_truth;
        }
        const double lo = X_(static_cast<Eigen::Index>(order[k]), f);
        const double hi = X_(static_cast<Eigen::Index>(order[k + 1]), f);
        if (!(lo < hi)) continue;
        const SplitScore s =
            score_split(weights_, left_lie, left_truth, node.counts[0] - left_lie,
                        node.counts[1] - left_truth);
        if (best_feature < 0 || s.better_than(best)) {
          best = s;
          best_feature = static_cast<int>(f);
          double mid = 0.5 * (lo + hi);
          if (mid >= hi) mid = lo;
          best_threshold = mid;
        }
      }
    }
    if (best_feature < 0) return id;

    std::vector<std::size_t> left, right;
    for (std::size_t r : rows) {
      (X_(static_cast<Eigen::Index>(r), best_feature) <= best_threshold ? left
                                                                        : right)
          .push_back(r);
    }
    rows.clear();
    rows.shrink_to_fit();
    const int l = grow(left, depth + 1);
    const int r = grow(right, depth + 1);
    nodes_[static_cast<std::size_t>(id)].feature = best_feature;
    nodes_[static_cast<std::size_t>(id)].threshold = best_threshold;
    nodes_[static_cast<std::size_t>(id)].left = l;
    nodes_[static_cast<std::size_t>(id)].right = r;
    return id;
  }

  const Eigen::MatrixXd& X_;
  std::span<const ClassLabel> y_;
  std::size_t max_depth_;
  ClassWeights weights_;
  std::vector<TreeNode> nodes_;
};

}  // namespace

DecisionTree fit_tree(const Eigen::MatrixXd& X, std::span<const ClassLabel> y,
                      std::size_t max_depth) {
  if (static_cast<std::size_t>(X.rows()) != y.size() || y.empty()) {
    throw Error(ErrorKind::ShapeMismatch,
                "tree training needs matching, non-empty rows and labels");
  }
  return DecisionTree(Builder(X, y, max_depth).build(), max_depth,
                      static_cast<std::size_t>(X.cols()));
}

ScoreMatrix tree_scores(const DecisionTree& tree, const Eigen::MatrixXd& X) {
  ScoreMatrix out;
  out.source = "tree";
  std::vector<double> row(static_cast<std::size_t>(X.cols()));
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    for (Eigen::Index c = 0; c < X.cols(); ++c) {
      row[static_cast<std::size_t>(c)] = X(i, c);
    }
    out.rows.push_back(tree.predict_scores(row));
  }
  return out;
}

}  // namespace dyadfuse::classify
