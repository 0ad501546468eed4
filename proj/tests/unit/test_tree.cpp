#include <doctest.h>

#include "dyadfuse/model_io.hpp"
#include "dyadfuse/rng.hpp"
#include "dyadfuse/tree.hpp"
#include "oracles.hpp"

using namespace dyadfuse;
using namespace dyadfuse::classify;

namespace {

double training_accuracy(const DecisionTree& tree, const Eigen::MatrixXd& X,
                         const std::vector<ClassLabel>& y) {
  const auto pred = tree_scores(tree, X).predictions();
  std::size_t hit = 0;
  for (std::size_t i = 0; i < y.size(); ++i) hit += pred[i] == y[i];
  return static_cast<double>(hit) / static_cast<double>(y.size());
}

}  // namespace

TEST_CASE("one-dimensional separable data splits at the midpoint") {
  Eigen::MatrixXd X(4, 1);
  X << 0, 1, 2, 3;
  const std::vector<ClassLabel> y = {ClassLabel::Lie, ClassLabel::Lie,
                                     ClassLabel::Truth, ClassLabel::Truth};
  const auto tree = fit_tree(X, y, 3);
  const auto& root = tree.nodes().front();
  CHECK(root.feature == 0);
  CHECK(root.threshold == 1.5);
  CHECK(tree.depth() == 1);
  CHECK(training_accuracy(tree, X, y) == 1.0);
}

TEST_CASE("equal splits resolve to the lowest feature then lowest threshold") {
  // Features 0 and 1 both separate perfectly; feature 0 wins.
  Eigen::MatrixXd X(4, 2);
  X << 3, 0, 3, 1, 7, 2, 7, 3;
  const std::vector<ClassLabel> y = {ClassLabel::Lie, ClassLabel::Lie,
                                     ClassLabel::Truth, ClassLabel::Truth};
  CHECK(fit_tree(X, y, 1).nodes().front().feature == 0);
  CHECK(fit_tree(X, y, 1).nodes().front().threshold == 5.0);

  // Within one feature, thresholds 0.5 and 2.5 each isolate one odd row
  // with identical impurity; the lower threshold wins.
  Eigen::MatrixXd Z(4, 1);
  Z << 0, 1, 2, 3;
  const std::vector<ClassLabel> z = {ClassLabel::Truth, ClassLabel::Lie,
                                     ClassLabel::Lie, ClassLabel::Truth};
  const auto root = fit_tree(Z, z, 1).nodes().front();
  CHECK(root.feature == 0);
  CHECK(root.threshold == 0.5);
}

TEST_CASE("the root split matches exhaustive search") {
  Rng rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::Index n = 4 + static_cast<Eigen::Index>(rng.index(20));
    const Eigen::Index p = 1 + static_cast<Eigen::Index>(rng.index(4));
    Eigen::MatrixXd X(n, p);
    std::vector<ClassLabel> y;
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < p; ++j) {
        X(i, j) = static_cast<double>(rng.index(6));
      }
      y.push_back(rng.coin() ? ClassLabel::Lie : ClassLabel::Truth);
    }
    const auto want = oracle::best_split(X, y);
    const auto tree = fit_tree(X, y, 1);
    const auto& root = tree.nodes().front();
    const bool pure = std::all_of(y.begin(), y.end(), [&](ClassLabel l) { return l == y[0]; });
    if (pure || want.feature < 0) {
      CHECK(root.is_leaf());
      continue;
    }
    CHECK(root.feature == want.feature);
    CHECK(root.threshold == want.threshold);
  }
}

TEST_CASE("depth never exceeds the bound") {
  Rng rng(2);
  for (int trial = 0; trial < 300; ++trial) {
    const Eigen::Index n = 2 + static_cast<Eigen::Index>(rng.index(40));
    Eigen::MatrixXd X(n, 3);
    std::vector<ClassLabel> y;
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < 3; ++j) X(i, j) = rng.normal();
      y.push_back(rng.coin() ? ClassLabel::Lie : ClassLabel::Truth);
    }
    const std::size_t bound = 1 + rng.index(5);
    const auto tree = fit_tree(X, y, bound);
    CHECK(tree.depth() <= bound);
    for (const auto& node : tree.nodes()) {
      CHECK(node.scores[0] + node.scores[1] == doctest::Approx(1.0));
      if (!node.is_leaf()) CHECK(node.depth < bound);
    }
  }
}

TEST_CASE("unlimited trees fit distinct rows perfectly") {
  Rng rng(9);
  Eigen::MatrixXd X(30, 2);
  std::vector<ClassLabel> y;
  for (Eigen::Index i = 0; i < 30; ++i) {
    X(i, 0) = rng.normal();
    X(i, 1) = rng.normal();
    y.push_back(rng.coin() ? ClassLabel::Lie : ClassLabel::Truth);
  }
  CHECK(training_accuracy(fit_tree(X, y, kUnlimitedDepth), X, y) == 1.0);
}

TEST_CASE("leaves hold class-weighted frequencies and unsplittable nodes stay leaves") {
  Eigen::MatrixXd X(3, 1);
  X << 1, 1, 1;
  const std::vector<ClassLabel> y = {ClassLabel::Lie, ClassLabel::Truth, ClassLabel::Truth};
  const auto tree = fit_tree(X, y, 3);
  REQUIRE(tree.nodes().size() == 1);
  CHECK(tree.nodes()[0].counts == std::array<std::size_t, 2>{1, 2});
  // One Lie at weight 3/2 against two Truths at weight 3/4 each.
  const double row[] = {1.0};
  CHECK(tree.predict_scores(row)[0] == doctest::Approx(0.5));
  CHECK(tree.predict_scores(row)[1] == doctest::Approx(0.5));
}

TEST_CASE("class weights change the chosen split") {
  // Unweighted Gini picks 4.5; with each Lie weighted 2x, 1.5 is purer.
  Eigen::MatrixXd X(6, 1);
  X << 0, 1, 2, 3, 4, 5;
  const std::vector<ClassLabel> y = {ClassLabel::Truth, ClassLabel::Truth, ClassLabel::Lie,
                                     ClassLabel::Truth, ClassLabel::Truth, ClassLabel::Lie};
  const auto root = fit_tree(X, y, 1).nodes().front();
  CHECK(root.threshold == 1.5);
  CHECK(oracle::best_split(X, y).threshold == 1.5);
}

TEST_CASE("trees round-trip through JSON") {
  Rng rng(4);
  Eigen::MatrixXd X(20, 2);
  std::vector<ClassLabel> y;
  for (Eigen::Index i = 0; i < 20; ++i) {
    X(i, 0) = rng.normal();
    X(i, 1) = rng.normal();
    y.push_back(rng.coin() ? ClassLabel::Lie : ClassLabel::Truth);
  }
  for (std::size_t depth : {std::size_t{2}, kUnlimitedDepth}) {
    const auto tree = fit_tree(X, y, depth);
    const auto back = tree_from_json(nlohmann::json::parse(to_json(tree).dump()));
    CHECK(to_json(back) == to_json(tree));
    CHECK(back.max_depth() == depth);
  }
}
