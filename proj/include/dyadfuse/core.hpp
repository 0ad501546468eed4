#pragma once

// Domain types shared by every pipeline stage.

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace dyadfuse {

enum class ErrorKind {
  MissingColumn,
  MalformedRow,
  EmptyFile,
  ScopeMismatch,
  ZeroLength,
  InvalidTargetLength,
  SeriesTooShort,
  ShapeMismatch,
  SingleClassTraining,
  LengthMismatch,
  MissingModality,
  ConfigParse,
  MissingInput,
  FoldFailure,
  Io,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library. `location` carries the 1-based line
/// number for MalformedRow and the fold index for fold-level errors.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message,
        std::optional<std::size_t> location = std::nullopt);

  ErrorKind kind() const noexcept { return kind_; }
  std::optional<std::size_t> location() const noexcept { return location_; }
  /// The message without the kind prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorKind kind_;
  std::string detail_;
  std::optional<std::size_t> location_;
};

// Lie is class 0 and the positive class of every confusion matrix.
enum class ClassLabel : std::uint8_t { Lie = 0, Truth = 1 };

constexpr std::size_t kNumClasses = 2;

constexpr std::size_t class_index(ClassLabel label) {
  return static_cast<std::size_t>(label);
}

std::string_view to_string(ClassLabel label);
ClassLabel parse_class_label(std::string_view text);

/// One modality's aligned series, stored instance-major then channel-major:
/// value(i, c, t) lives at data[(i * channels + c) * timesteps + t].
class ModalityTensor {
 public:
  ModalityTensor() = default;
  ModalityTensor(std::string name, std::size_t instances,
                 std::vector<std::string> channel_names, std::size_t timesteps,
                 std::vector<double> data, double sample_rate_hz);

  const std::string& name() const noexcept { return name_; }
  std::size_t instances() const noexcept { return instances_; }
  std::size_t channels() const noexcept { return channel_names_.size(); }
  std::size_t timesteps() const noexcept { return timesteps_; }
  double sample_rate_hz() const noexcept { return sample_rate_hz_; }
  const std::vector<std::string>& channel_names() const noexcept {
    return channel_names_;
  }
  std::span<const double> data() const noexcept { return data_; }

  double at(std::size_t instance, std::size_t channel, std::size_t t) const {
    return data_[offset(instance, channel) + t];
  }
  std::span<const double> series(std::size_t instance,
                                 std::size_t channel) const {
    return std::span<const double>(data_).subspan(offset(instance, channel),
                                                  timesteps_);
  }

  /// Copy of the given instances, in the given order.
  ModalityTensor select_instances(std::span<const std::size_t> rows) const;
  /// Copy of the given channels, in the given order.
  ModalityTensor select_channels(std::span<const std::size_t> columns) const;
  ModalityTensor renamed(std::string name) const;

 private:
  std::size_t offset(std::size_t instance, std::size_t channel) const {
    return (instance * channel_names_.size() + channel) * timesteps_;
  }

  std::string name_;
  std::size_t instances_ = 0;
  std::vector<std::string> channel_names_;
  std::size_t timesteps_ = 0;
  std::vector<double> data_;
  double sample_rate_hz_ = 1.0;
};

struct LabeledDataset {
  std::vector<std::string> dyad_ids;
  std::vector<ClassLabel> labels;
  std::map<std::string, ModalityTensor> modalities;

  std::size_t size() const noexcept { return dyad_ids.size(); }
  const ModalityTensor& modality(const std::string& name) const;
};

/// Returns one human-readable message per violated invariant; empty when the
/// dataset is consistent.
std::vector<std::string> validate_dataset(const LabeledDataset& dataset);

using ClassScores = std::array<double, kNumClasses>;

struct ScoreMatrix {
  std::vector<ClassScores> rows;
  std::string source;

  std::size_t size() const noexcept { return rows.size(); }
  /// Ties resolve to the lower class index (Lie).
  ClassLabel argmax(std::size_t row) const;
  std::vector<ClassLabel> predictions() const;
};

/// True when every row is non-negative and sums to 1 within `tolerance`.
bool rows_are_distributions(const ScoreMatrix& scores,
                            double tolerance = 1e-9);

/// Counts with Lie as the positive class.
struct Confusion {
  std::size_t tp = 0;  // Lie predicted Lie
  std::size_t fn = 0;  // Lie predicted Truth
  std::size_t fp = 0;  // Truth predicted Lie
  std::size_t tn = 0;  // Truth predicted Truth

  std::size_t total() const noexcept { return tp + fn + fp + tn; }
};

struct Metrics {
  Confusion confusion;
  double precision_lie = 0.0;
  double precision_truth = 0.0;
  double recall_lie = 0.0;
  double recall_truth = 0.0;
  double accuracy = 0.0;
  // Set when the corresponding ratio had a zero denominator and was reported
  // as 0.
  bool precision_lie_undefined = false;
  bool precision_truth_undefined = false;
  bool recall_lie_undefined = false;
  bool recall_truth_undefined = false;
};

/// Table-row descriptor, e.g. {"Voice", "Both", "Rocket"}.
struct ConfigDescriptor {
  std::string modality;
  std::string participants;
  std::string method;
};

struct DyadPrediction {
  std::string dyad_id;
  ClassLabel label = ClassLabel::Lie;
  ClassLabel predicted = ClassLabel::Lie;
  ClassScores scores{0.5, 0.5};
};

struct EvalReport {
  std::string key;  // stable identifier of the experiment configuration
  ConfigDescriptor config;
  std::uint64_t seed = 0;
  Metrics metrics;
  std::vector<DyadPrediction> predictions;
};

}  // namespace dyadfuse
