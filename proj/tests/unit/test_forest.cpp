#include <doctest.h>

#include <cmath>

#include "dyadfuse/interval_forest.hpp"
#include "dyadfuse/model_io.hpp"
#include "oracles.hpp"

using namespace dyadfuse;
using namespace dyadfuse::classify;

TEST_CASE("interval count scales with sqrt(T) * sqrt(C)") {
  CHECK(intervals_per_tree(100, 4) == 20);
  CHECK(intervals_per_tree(3, 1) == 1);
  CHECK(intervals_per_tree(19739, 25) == 702);
}

TEST_CASE("interval features match direct statistics") {
  const auto t = fixtures::random_tensor(3, 2, 30, 6);
  const std::vector<Interval> ivs = {{0, 0, 30}, {1, 5, 3}, {1, 10, 17}};
  const auto X = interval_features(t, ivs);
  REQUIRE(X.rows() == 3);
  REQUIRE(X.cols() == 9);
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t k = 0; k < ivs.size(); ++k) {
      const auto s = t.series(i, ivs[k].channel).subspan(ivs[k].start, ivs[k].length);
      const double L = static_cast<double>(s.size());
      double mean = 0.0;
      for (double v : s) mean += v;
      mean /= L;
      double var = 0.0, sxy = 0.0, sxx = 0.0;
      const double tm = (L - 1.0) / 2.0;
      for (std::size_t u = 0; u < s.size(); ++u) {
        var += (s[u] - mean) * (s[u] - mean);
        sxy += (static_cast<double>(u) - tm) * (s[u] - mean);
        sxx += (static_cast<double>(u) - tm) * (static_cast<double>(u) - tm);
      }
      CHECK(std::abs(X(i, 3 * k) - mean) < 1e-12);
      CHECK(std::abs(X(i, 3 * k + 1) - std::sqrt(var / L)) < 1e-9);
      CHECK(std::abs(X(i, 3 * k + 2) - sxy / sxx) < 1e-12);
    }
  }
}

TEST_CASE("forests are seeded, valid and separate shifted classes") {
  const std::size_t n = 20, T = 60;
  auto base = fixtures::random_tensor(n, 3, T, 15);
  std::vector<double> data(base.data().begin(), base.data().end());
  std::vector<ClassLabel> y = fixtures::alternating_labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (y[i] == ClassLabel::Lie) {
      for (std::size_t t = 0; t < T; ++t) data[(i * 3 + 1) * T + t] += 3.0;
    }
  }
  const ModalityTensor t("m", n, base.channel_names(), T, data, 1.0);
  const auto forest = fit_interval_forest(t, y, 15, 99);
  CHECK(forest.trees.size() == 15);
  for (const auto& tree : forest.trees) {
    CHECK(tree.intervals.size() == intervals_per_tree(T, 3));
    for (const auto& iv : tree.intervals) {
      CHECK(iv.channel < 3);
      CHECK(iv.length >= 3);
      CHECK(iv.start + iv.length <= T);
    }
  }
  const auto scores = forest_scores(forest, t);
  CHECK(rows_are_distributions(scores));
  CHECK(scores.predictions() == y);

  const auto again = fit_interval_forest(t, y, 15, 99);
  CHECK(to_json(again) == to_json(forest));
  CHECK(to_json(fit_interval_forest(t, y, 15, 100)) != to_json(forest));

  const auto back = forest_from_json(nlohmann::json::parse(to_json(forest).dump()));
  CHECK(forest_scores(back, t).rows == scores.rows);
}

TEST_CASE("forests reject series shorter than one interval") {
  const auto t = fixtures::random_tensor(4, 1, 2, 1);
  CHECK_THROWS_AS(fit_interval_forest(t, fixtures::alternating_labels(4), 3, 1), Error);
}
