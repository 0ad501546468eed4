#include "dyadfuse/fusion.hpp"

#include <algorithm>

#include "dyadfuse/parallel.hpp"
#include "dyadfuse/rng.hpp"

namespace dyadfuse::fusion {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

bool starts_with(const std::string& s, std::string_view prefix) {
  return s.size() >= prefix.size() && s.compare(0, prefix.size(), prefix) == 0;
}

void check_loo_input(std::size_t instances, std::span<const ClassLabel> labels) {
  if (instances != labels.size()) {
    throw Error(ErrorKind::LengthMismatch,
                "instances (" + std::to_string(instances) + ") and labels (" +
                    std::to_string(labels.size()) + ") differ");
  }
  if (labels.size() < 3) {
    throw Error(ErrorKind::ShapeMismatch,
                "leave-one-out needs at least 3 dyads");
  }
}

std::vector<ClassLabel> labels_at(std::span<const ClassLabel> labels,
                                  std::span<const std::size_t> rows) {
  std::vector<ClassLabel> out;
  out.reserve(rows.size());
  for (std::size_t r : rows) out.push_back(labels[r]);
  return out;
}

void require_both_classes(std::span<const ClassLabel> labels,
                          std::size_t fold) {
  const bool lie =
      std::find(labels.begin(), labels.end(), ClassLabel::Lie) != labels.end();
  const bool truth = std::find(labels.begin(), labels.end(),
                               ClassLabel::Truth) != labels.end();
  if (!lie || !truth) {
    throw Error(ErrorKind::SingleClassTraining,
                "fold " + std::to_string(fold) +
                    ": training dyads cover a single class",
                fold);
  }
}

Eigen::MatrixXd rows_of(const Eigen::MatrixXd& X,
                        std::span<const std::size_t> rows) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), X.cols());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    out.row(static_cast<Eigen::Index>(k)) =
        X.row(static_cast<Eigen::Index>(rows[k]));
  }
  return out;
}

// Runs body(fold) for every fold and tags escaping errors with the fold id.
template <typename Body>
void for_each_fold(std::size_t n, std::size_t jobs, Body&& body) {
  parallel_for(n, jobs, [&](std::size_t fold) {
    try {
      body(fold);
    } catch (const Error& e) {
      if (e.location()) throw;
      throw Error(e.kind(), "fold " + std::to_string(fold) + ": " + e.detail(),
                  fold);
    }
  });
}

}  // namespace

ModalityTensor select_scope(const ModalityTensor& tensor, Scope scope) {
  std::vector<std::size_t> sender, all;
  bool has_receiver = false;
  for (std::size_t c = 0; c < tensor.channels(); ++c) {
    const auto& name = tensor.channel_names()[c];
    all.push_back(c);
    if (starts_with(name, "sender/")) sender.push_back(c);
    if (starts_with(name, "receiver/")) has_receiver = true;
  }
  if (scope == Scope::Both) {
    if (!has_receiver) {
      throw Error(ErrorKind::ScopeMismatch,
                  "tensor '" + tensor.name() + "' has no receiver channels");
    }
    return tensor;
  }
  if (sender.empty()) {
    throw Error(ErrorKind::ScopeMismatch,
                "tensor '" + tensor.name() + "' has no sender channels");
  }
  if (sender.size() == tensor.channels()) return tensor;
  return tensor.select_channels(sender);
}

ModalityTensor early_fuse(const LabeledDataset& dataset,
                          const FusionConfig& config) {
  const auto& facial = dataset.modality(kFacial);
  const auto& audio = dataset.modality(kAudio);
  if (facial.instances() != audio.instances()) {
    throw Error(ErrorKind::ShapeMismatch,
                "facial and audio tensors hold different instance counts");
  }
  const std::size_t target = config.early.target_timesteps;
  if (target == 0 || target > std::min(facial.timesteps(), audio.timesteps())) {
    throw Error(ErrorKind::InvalidTargetLength,
                "early-fusion length " + std::to_string(target) +
                    " exceeds the shorter modality (" +
                    std::to_string(std::min(facial.timesteps(),
                                            audio.timesteps())) +
                    ")");
  }
  const auto parts = {
      transform::summarize_tensor(select_scope(facial, config.facial_scope),
                                  config.early),
      transform::summarize_tensor(select_scope(audio, config.audio_scope),
                                  config.early)};

  std::vector<std::string> names;
  for (const auto& part : parts) {
    for (const auto& c : part.channel_names()) {
      names.push_back(part.name() + "/" + c);
    }
  }
  std::vector<double> data;
  data.reserve(facial.instances() * names.size() * target);
  for (std::size_t i = 0; i < facial.instances(); ++i) {
    for (const auto& part : parts) {
      for (std::size_t c = 0; c < part.channels(); ++c) {
        const auto s = part.series(i, c);
        data.insert(data.end(), s.begin(), s.end());
      }
    }
  }
  return ModalityTensor("early", facial.instances(), std::move(names), target,
                        std::move(data), parts.begin()->sample_rate_hz());
}

std::vector<std::size_t> training_rows(std::size_t n, std::size_t held_out) {
  std::vector<std::size_t> rows;
  rows.reserve(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    if (i != held_out) rows.push_back(i);
  }
  return rows;
}

std::uint64_t kernel_bank_seed(std::uint64_t seed) {
  return derive_seed(seed, "kernel-bank");
}

std::uint64_t fold_seed(std::uint64_t seed, std::size_t fold) {
  return derive_seed(derive_seed(seed, "fold"), fold);
}

ScoreMatrix collect_oof_scores(const ModalityTensor& tensor,
                               std::span<const ClassLabel> labels,
                               const ClassifierSpec& classifier,
                               std::uint64_t seed, std::size_t jobs) {
  check_loo_input(tensor.instances(), labels);
  const std::size_t n = labels.size();
  ScoreMatrix out;
  out.rows.assign(n, {0.5, 0.5});

  std::visit(
      overloaded{
          [&](const RocketSpec& spec) {
            out.source = "rocket:" + tensor.name();
            const auto bank = classify::generate_kernels(
                spec.num_kernels, kernel_bank_seed(seed), tensor.timesteps(),
                tensor.channels());
            const classify::FeatureMatrix features =
                classify::rocket_transform(tensor, bank, jobs);
            for_each_fold(n, jobs, [&](std::size_t fold) {
              const auto rows = training_rows(n, fold);
              const auto train_labels = labels_at(labels, rows);
              require_both_classes(train_labels, fold);
              const auto model = classify::fit_ridge(rows_of(features, rows),
                                                     train_labels, spec.alphas);
              const std::size_t held[] = {fold};
              out.rows[fold] =
                  classify::ridge_scores(model, rows_of(features, held)).rows[0];
            });
          },
          [&](const IntervalForestSpec& spec) {
            out.source = "interval_forest:" + tensor.name();
            for_each_fold(n, jobs, [&](std::size_t fold) {
              const auto rows = training_rows(n, fold);
              const auto train_labels = labels_at(labels, rows);
              require_both_classes(train_labels, fold);
              const auto forest = classify::fit_interval_forest(
                  tensor.select_instances(rows), train_labels, spec.n_trees,
                  fold_seed(seed, fold));
              const std::size_t held[] = {fold};
              out.rows[fold] =
                  classify::forest_scores(forest,
                                          tensor.select_instances(held))
                      .rows[0];
            });
          },
          [&](const CustomLearner& learner) {
            out.source = "custom:" + tensor.name();
            for_each_fold(n, jobs, [&](std::size_t fold) {
              const auto rows = training_rows(n, fold);
              const auto train_labels = labels_at(labels, rows);
              require_both_classes(train_labels, fold);
              const std::size_t held[] = {fold};
              out.rows[fold] =
                  learner(tensor.select_instances(rows), train_labels,
                          tensor.select_instances(held), fold_seed(seed, fold));
            });
          },
      },
      classifier);
  return out;
}

ScoreMatrix collect_oof_scores(const LabeledDataset& dataset,
                               const std::string& modality,
                               const ClassifierSpec& classifier,
                               std::uint64_t seed, std::size_t jobs) {
  return collect_oof_scores(dataset.modality(modality), dataset.labels,
                            classifier, seed, jobs);
}

FoldModel fit_fold_model(const ModalityTensor& tensor,
                         std::span<const ClassLabel> labels,
                         const ClassifierSpec& classifier, std::uint64_t seed,
                         std::size_t fold) {
  check_loo_input(tensor.instances(), labels);
  if (fold >= labels.size()) {
    throw Error(ErrorKind::ShapeMismatch, "fold index out of range");
  }
  const auto rows = training_rows(labels.size(), fold);
  const auto train_labels = labels_at(labels, rows);
  require_both_classes(train_labels, fold);
  if (const auto* rocket = std::get_if<RocketSpec>(&classifier)) {
    classify::RocketModel model;
    model.bank = classify::generate_kernels(rocket->num_kernels,
                                            kernel_bank_seed(seed),
                                            tensor.timesteps(),
                                            tensor.channels());
    // Only the training instances are transformed.
    const auto train = tensor.select_instances(rows);
    model.ridge = classify::fit_ridge(
        classify::rocket_transform(train, model.bank), train_labels,
        rocket->alphas);
    return model;
  }
  if (const auto* forest = std::get_if<IntervalForestSpec>(&classifier)) {
    return classify::fit_interval_forest(tensor.select_instances(rows),
                                         train_labels, forest->n_trees,
                                         fold_seed(seed, fold));
  }
  throw Error(ErrorKind::ConfigParse,
              "custom learners do not expose fitted models");
}

nlohmann::json to_json(const FoldModel& model) {
  return std::visit([](const auto& m) { return classify::to_json(m); }, model);
}

Eigen::MatrixXd meta_features(std::span<const ScoreMatrix> base_scores) {
  if (base_scores.empty()) {
    throw Error(ErrorKind::ShapeMismatch, "late fusion needs base scores");
  }
  const std::size_t n = base_scores.front().size();
  Eigen::MatrixXd X(static_cast<Eigen::Index>(n),
                    static_cast<Eigen::Index>(2 * base_scores.size()));
  for (std::size_t m = 0; m < base_scores.size(); ++m) {
    if (base_scores[m].size() != n) {
      throw Error(ErrorKind::ShapeMismatch,
                  "base score matrices differ in instance count");
    }
    for (std::size_t i = 0; i < n; ++i) {
      X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(2 * m)) =
          base_scores[m].rows[i][0];
      X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(2 * m + 1)) =
          base_scores[m].rows[i][1];
    }
  }
  return X;
}

classify::DecisionTree fit_meta_fold(std::span<const ScoreMatrix> base_scores,
                                     std::span<const ClassLabel> labels,
                                     std::size_t max_depth, std::size_t fold) {
  const Eigen::MatrixXd X = meta_features(base_scores);
  check_loo_input(static_cast<std::size_t>(X.rows()), labels);
  const auto rows = training_rows(labels.size(), fold);
  const auto train_labels = labels_at(labels, rows);
  require_both_classes(train_labels, fold);
  return classify::fit_tree(rows_of(X, rows), train_labels, max_depth);
}

LateFusionResult late_fuse(std::span<const ScoreMatrix> base_scores,
                           std::span<const ClassLabel> labels,
                           std::size_t max_depth, std::size_t jobs) {
  if (max_depth == 0) {
    throw Error(ErrorKind::ConfigParse, "meta tree depth must be >= 1");
  }
  const Eigen::MatrixXd X = meta_features(base_scores);
  check_loo_input(static_cast<std::size_t>(X.rows()), labels);
  const std::size_t n = labels.size();
  LateFusionResult result;
  result.meta_scores.source = "late_fusion";
  result.meta_scores.rows.assign(n, {0.5, 0.5});
  for_each_fold(n, jobs, [&](std::size_t fold) {
    const auto rows = training_rows(n, fold);
    const auto train_labels = labels_at(labels, rows);
    require_both_classes(train_labels, fold);
    const auto tree =
        classify::fit_tree(rows_of(X, rows), train_labels, max_depth);
    const std::size_t held[] = {fold};
    result.meta_scores.rows[fold] =
        classify::tree_scores(tree, rows_of(X, held)).rows[0];
  });
  result.predictions = result.meta_scores.predictions();
  return result;
}

}  // namespace dyadfuse::fusion
