#pragma once

// Experiment driver, metrics and results tables.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dyadfuse/core.hpp"
#include "dyadfuse/fusion.hpp"
#include "dyadfuse/transform.hpp"

namespace dyadfuse::eval {

using ingest::Scope;

enum class Mode { Unimodal, EarlyFusion, LateFusion };
enum class ClassifierKind { Rocket, IntervalForest };

std::string to_string(Mode mode);
std::string to_string(ClassifierKind kind);
Mode parse_mode(const std::string& text);
ClassifierKind parse_classifier(const std::string& text);

struct ExperimentSpec {
  Mode mode = Mode::Unimodal;
  std::string modality = fusion::kAudio;  // unimodal only
  Scope facial_scope = Scope::SenderOnly;
  Scope audio_scope = Scope::SenderOnly;
  ClassifierKind classifier = ClassifierKind::Rocket;
  transform::SummarizationSpec summarization;  // early fusion only
  std::size_t num_kernels = classify::kDefaultNumKernels;
  std::size_t n_trees = classify::kDefaultForestTrees;
  std::size_t meta_max_depth = 3;
  bool normalize = true;  // z-score each series before anything else
  std::uint64_t seed = 0;

  /// Scope of the unimodal modality.
  Scope scope() const {
    return modality == fusion::kFacial ? facial_scope : audio_scope;
  }
  /// Stable, filename-safe identifier, e.g. "unimodal-audio-both-rocket".
  std::string key() const;
  ConfigDescriptor descriptor() const;
};

/// Throws ConfigParse when the spec is internally inconsistent (fusion
/// pipelines use the kernel classifier only).
void validate(const ExperimentSpec& spec);

inline constexpr std::size_t kMaxEarlyTimesteps = 10000;

/// min(kMaxEarlyTimesteps, shortest modality); used when an early-fusion
/// spec leaves target_timesteps at 0.
std::size_t default_early_timesteps(const LabeledDataset& dataset);

/// Pooled confusion matrix over all predictions, Lie as positive class.
Metrics compute_metrics(std::span<const ClassLabel> predictions,
                        std::span<const ClassLabel> labels);

/// Leave-one-dyad-out evaluation of one configuration.
EvalReport run_experiment(const LabeledDataset& dataset,
                          const ExperimentSpec& spec, std::size_t jobs = 1);

/// Table-2 style sweep: unimodal rows for both modalities and scopes with
/// each classifier, early fusion over every scope pair with PAA and SAX, and
/// late fusion over every scope pair. `early_timesteps` of 0 picks
/// min(10000, shortest modality).
std::vector<ExperimentSpec> default_sweep(std::uint64_t seed,
                                          std::size_t num_kernels,
                                          std::size_t n_trees,
                                          std::size_t early_timesteps,
                                          std::size_t alphabet_size = 16);

/// Half-up rounding to `decimals` places. A 1e-9 nudge absorbs binary
/// representation error so ratios like 0.645 round up.
double round_half_up(double value, int decimals = 2);

/// Aligned plain-text table, rates rounded to two decimals.
std::string format_table(std::span<const EvalReport> reports);
/// Machine-readable table with full-precision rates and confusion counts.
std::string format_csv(std::span<const EvalReport> reports);
/// Inverse of format_csv (predictions are not part of the CSV).
std::vector<EvalReport> parse_csv(const std::string& text);
/// dyad_id,label,predicted,score_lie,score_truth
std::string format_predictions(const EvalReport& report);

}  // namespace dyadfuse::eval
