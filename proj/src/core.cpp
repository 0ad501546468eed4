#include "dyadfuse/core.hpp"

#include <cmath>
#include <set>
#include <utility>

namespace dyadfuse {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::MissingColumn: return "MissingColumn";
    case ErrorKind::MalformedRow: return "MalformedRow";
    case ErrorKind::EmptyFile: return "EmptyFile";
    case ErrorKind::ScopeMismatch: return "ScopeMismatch";
    case ErrorKind::ZeroLength: return "ZeroLength";
    case ErrorKind::InvalidTargetLength: return "InvalidTargetLength";
    case ErrorKind::SeriesTooShort: return "SeriesTooShort";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::SingleClassTraining: return "SingleClassTraining";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::MissingModality: return "MissingModality";
    case ErrorKind::ConfigParse: return "ConfigParse";
    case ErrorKind::MissingInput: return "MissingInput";
    case ErrorKind::FoldFailure: return "FoldFailure";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message,
             std::optional<std::size_t> location)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message),
      kind_(kind),
      detail_(message),
      location_(location) {}

std::string_view to_string(ClassLabel label) {
  return label == ClassLabel::Lie ? "lie" : "truth";
}

ClassLabel parse_class_label(std::string_view text) {
  if (text == "lie" || text == "Lie" || text == "0") return ClassLabel::Lie;
  if (text == "truth" || text == "Truth" || text == "1") return ClassLabel::Truth;
  throw Error(ErrorKind::ConfigParse,
              "unknown class label '" + std::string(text) + "'");
}

ModalityTensor::ModalityTensor(std::string name, std::size_t instances,
                               std::vector<std::string> channel_names,
                               std::size_t timesteps, std::vector<double> data,
                               double sample_rate_hz)
    : name_(std::move(name)),
      instances_(instances),
      channel_names_(std::move(channel_names)),
      timesteps_(timesteps),
      data_(std::move(data)),
      sample_rate_hz_(sample_rate_hz) {
  if (data_.size() != instances_ * channel_names_.size() * timesteps_) {
    throw Error(ErrorKind::ShapeMismatch,
                "tensor '" + name_ + "' holds " + std::to_string(data_.size()) +
                    " values, expected " +
                    std::to_string(instances_ * channel_names_.size() *
                                   timesteps_));
  }
  if (!(sample_rate_hz_ > 0.0)) {
    throw Error(ErrorKind::ShapeMismatch,
                "tensor '" + name_ + "' has non-positive sample rate");
  }
}

ModalityTensor ModalityTensor::select_instances(
    std::span<const std::size_t> rows) const {
  std::vector<double> out;
  out.reserve(rows.size() * channels() * timesteps_);
  for (std::size_t row : rows) {
    if (row >= instances_) {
      throw Error(ErrorKind::ShapeMismatch, "instance index out of range");
    }
    auto block = std::span<const double>(data_).subspan(
        offset(row, 0), channels() * timesteps_);
    out.insert(out.end(), block.begin(), block.end());
  }
  return ModalityTensor(name_, rows.size(), channel_names_, timesteps_,
                        std::move(out), sample_rate_hz_);
}

ModalityTensor ModalityTensor::select_channels(
    std::span<const std::size_t> columns) const {
  std::vector<std::string> names;
  names.reserve(columns.size());
  for (std::size_t c : columns) {
    if (c >= channels()) {
      throw Error(ErrorKind::ShapeMismatch, "channel index out of range");
    }
    names.push_back(channel_names_[c]);
  }
  std::vector<double> out;
  out.reserve(instances_ * columns.size() * timesteps_);
  for (std::size_t i = 0; i < instances_; ++i) {
    for (std::size_t c : columns) {
      auto s = series(i, c);
      out.insert(out.end(), s.begin(), s.end());
    }
  }
  return ModalityTensor(name_, instances_, std::move(names), timesteps_,
                        std::move(out), sample_rate_hz_);
}

ModalityTensor ModalityTensor::renamed(std::string name) const {
  ModalityTensor copy = *this;
  copy.name_ = std::move(name);
  return copy;
}

const ModalityTensor& LabeledDataset::modality(const std::string& name) const {
  auto it = modalities.find(name);
  if (it == modalities.end()) {
    throw Error(ErrorKind::MissingModality,
                "dataset has no modality '" + name + "'");
  }
  return it->second;
}

std::vector<std::string> validate_dataset(const LabeledDataset& dataset) {
  std::vector<std::string> violations;
  const std::size_t n = dataset.dyad_ids.size();
  if (dataset.labels.size() != n) {
    violations.push_back("labels: instance count mismatch (" +
                         std::to_string(dataset.labels.size()) + " labels vs " +
                         std::to_string(n) + " dyad ids)");
  }
  std::set<std::string> seen;
  for (const auto& id : dataset.dyad_ids) {
    if (!seen.insert(id).second) {
      violations.push_back("dyad_ids: duplicate id '" + id + "'");
    }
  }
  for (const auto& [name, tensor] : dataset.modalities) {
    if (tensor.instances() != n) {
      violations.push_back("tensor '" + name + "': instance count mismatch (" +
                           std::to_string(tensor.instances()) + " vs " +
                           std::to_string(n) + ")");
    }
    if (tensor.channels() == 0 || tensor.timesteps() == 0) {
      violations.push_back("tensor '" + name + "': empty channel or time axis");
    }
    for (double v : tensor.data()) {
      if (!std::isfinite(v)) {
        violations.push_back("tensor '" + name + "': non-finite value");
        break;
      }
    }
  }
  return violations;
}

ClassLabel ScoreMatrix::argmax(std::size_t row) const {
  const auto& r = rows.at(row);
  return r[1] > r[0] ? ClassLabel::Truth : ClassLabel::Lie;
}

std::vector<ClassLabel> ScoreMatrix::predictions() const {
  std::vector<ClassLabel> out;
  out.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) out.push_back(argmax(i));
  return out;
}

bool rows_are_distributions(const ScoreMatrix& scores, double tolerance) {
  for (const auto& row : scores.rows) {
    double sum = 0.0;
    for (double v : row) {
      if (!(v >= 0.0)) return false;
      sum += v;
    }
    if (std::abs(sum - 1.0) > tolerance) return false;
  }
  return true;
}

}  // namespace dyadfuse
