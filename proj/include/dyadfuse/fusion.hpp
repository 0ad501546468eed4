#pragma once

// Dyad-level out-of-fold scoring, early fusion (summarize + concatenate
// channels) and late fusion (a shallow meta tree over base-model scores).

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <json.hpp>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "dyadfuse/core.hpp"
#include "dyadfuse/ingest.hpp"
#include "dyadfuse/interval_forest.hpp"
#include "dyadfuse/model_io.hpp"
#include "dyadfuse/ridge.hpp"
#include "dyadfuse/rocket.hpp"
#include "dyadfuse/transform.hpp"
#include "dyadfuse/tree.hpp"

namespace dyadfuse::fusion {

using ingest::Scope;

inline constexpr const char* kFacial = "facial";
inline constexpr const char* kAudio = "audio";

struct RocketSpec {
  std::size_t num_kernels = classify::kDefaultNumKernels;
  std::vector<double> alphas = classify::default_alpha_grid();
};

struct IntervalForestSpec {
  std::size_t n_trees = classify::kDefaultForestTrees;
};

/// Any learner that fits on the training dyads and scores the held-out one.
using CustomLearner = std::function<ClassScores(
    const ModalityTensor& train, std::span<const ClassLabel> train_labels,
    const ModalityTensor& held_out, std::uint64_t fold_seed)>;

using ClassifierSpec = std::variant<RocketSpec, IntervalForestSpec, CustomLearner>;

/// Keeps the "sender/" channels for SenderOnly; Both requires receiver
/// channels to be present.
ModalityTensor select_scope(const ModalityTensor& tensor, Scope scope);

struct FusionConfig {
  Scope facial_scope = Scope::SenderOnly;
  Scope audio_scope = Scope::SenderOnly;
  transform::SummarizationSpec early;
  std::size_t meta_max_depth = 3;
};

/// Summarizes the facial and audio tensors to early.target_timesteps and
/// concatenates their channels, facial block first.
ModalityTensor early_fuse(const LabeledDataset& dataset,
                          const FusionConfig& config);

/// Every index in [0, n) except `held_out`, ascending.
std::vector<std::size_t> training_rows(std::size_t n, std::size_t held_out);

/// Seed of the kernel bank shared by all folds of one Rocket run; kernel
/// generation never looks at the data.
std::uint64_t kernel_bank_seed(std::uint64_t seed);
/// Seed owned by fold `fold`.
std::uint64_t fold_seed(std::uint64_t seed, std::size_t fold);

/// Row i of the result comes from a model fitted on every instance except i.
ScoreMatrix collect_oof_scores(const ModalityTensor& tensor,
                               std::span<const ClassLabel> labels,
                               const ClassifierSpec& classifier,
                               std::uint64_t seed, std::size_t jobs = 1);

ScoreMatrix collect_oof_scores(const LabeledDataset& dataset,
                               const std::string& modality,
                               const ClassifierSpec& classifier,
                               std::uint64_t seed, std::size_t jobs = 1);

using FoldModel = std::variant<classify::RocketModel, classify::IntervalForest>;

/// The model collect_oof_scores uses to predict instance `fold`. Not
/// available for custom learners.
FoldModel fit_fold_model(const ModalityTensor& tensor,
                         std::span<const ClassLabel> labels,
                         const ClassifierSpec& classifier, std::uint64_t seed,
                         std::size_t fold);

nlohmann::json to_json(const FoldModel& model);

/// [instances x 2*matrices]: both class scores of each matrix, in order.
Eigen::MatrixXd meta_features(std::span<const ScoreMatrix> base_scores);

/// The meta tree that predicts instance `fold`, fitted on all other rows.
classify::DecisionTree fit_meta_fold(std::span<const ScoreMatrix> base_scores,
                                     std::span<const ClassLabel> labels,
                                     std::size_t max_depth, std::size_t fold);

struct LateFusionResult {
  std::vector<ClassLabel> predictions;
  ScoreMatrix meta_scores;
};

LateFusionResult late_fuse(std::span<const ScoreMatrix> base_scores,
                           std::span<const ClassLabel> labels,
                           std::size_t max_depth = 3, std::size_t jobs = 1);

}  // namespace dyadfuse::fusion
