#pragma once

// Structured-text (JSON) dumps of fitted models. Doubles are written with
// round-trip precision, so load(dump(m)) reproduces m bit for bit.

#include <filesystem>
#include <json.hpp>

#include "dyadfuse/interval_forest.hpp"
#include "dyadfuse/ridge.hpp"
#include "dyadfuse/rocket.hpp"
#include "dyadfuse/tree.hpp"

namespace dyadfuse::classify {

/// A kernel bank plus the ridge head fitted on its features.
struct RocketModel {
  KernelBank bank;
  RidgeModel ridge;
};

nlohmann::json to_json(const KernelBank& bank);
nlohmann::json to_json(const RidgeModel& model);
nlohmann::json to_json(const DecisionTree& tree);
nlohmann::json to_json(const IntervalForest& forest);
nlohmann::json to_json(const RocketModel& model);

KernelBank kernel_bank_from_json(const nlohmann::json& j);
RidgeModel ridge_from_json(const nlohmann::json& j);
DecisionTree tree_from_json(const nlohmann::json& j);
IntervalForest forest_from_json(const nlohmann::json& j);
RocketModel rocket_from_json(const nlohmann::json& j);

void save_json(const nlohmann::json& j, const std::filesystem::path& path);
nlohmann::json load_json(const std::filesystem::path& path);

}  // namespace dyadfuse::classify
