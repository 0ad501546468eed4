#pragma once

// Reading per-participant feature exports (OpenFace / openSMILE style CSV) and
// assembling them into labeled modality tensors according to a manifest.

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dyadfuse/core.hpp"

namespace dyadfuse::ingest {

enum class Scope { SenderOnly, Both };

std::string to_string(Scope scope);
Scope parse_scope(const std::string& text);

struct RawFeatureTable {
  std::vector<std::string> columns;
  std::size_t rows = 0;
  std::vector<double> values;  // row-major, rows x columns

  double at(std::size_t row, std::size_t column) const {
    return values[row * columns.size() + column];
  }
};

/// Parses a delimited table with one header row and keeps only `channels`,
/// in the requested order. Header names are matched exactly after trimming
/// surrounding whitespace.
RawFeatureTable parse_feature_table(const std::filesystem::path& path,
                                    const std::vector<std::string>& channels,
                                    char delimiter = ',');

/// The tables of one dyad for one modality. `receiver` is required when
/// assembling with Scope::Both.
struct ParticipantTables {
  RawFeatureTable sender;
  std::optional<RawFeatureTable> receiver;
};

/// Stacks per-dyad tables into a tensor. Sender channels come first, names
/// are prefixed "sender/" and "receiver/", and every series is truncated to
/// the shortest table in the modality.
ModalityTensor assemble_modality(const std::string& name,
                                 const std::vector<ParticipantTables>& dyads,
                                 Scope scope, double sample_rate_hz);

/// 17 OpenFace AU intensities followed by 8 gaze columns.
std::vector<std::string> default_facial_channels();
/// 24 eGeMAPS low-level descriptors (F2 bandwidth omitted).
std::vector<std::string> default_audio_channels();

struct ModalitySettings {
  std::vector<std::string> channels;
  Scope scope = Scope::Both;
  double sample_rate_hz = 1.0;
  char delimiter = ',';
  // Optional row window [trim_start, trim_end) applied to every table before
  // truncation.
  std::size_t trim_start = 0;
  std::optional<std::size_t> trim_end;
};

struct ParticipantPaths {
  std::filesystem::path sender;
  std::optional<std::filesystem::path> receiver;
};

struct DyadEntry {
  std::string dyad_id;
  ClassLabel condition = ClassLabel::Truth;
  std::map<std::string, ParticipantPaths> files;  // keyed by modality
};

/// Manifest file format (JSON):
///
///   {
///     "modalities": {
///       "facial": {"channels": [...], "scope": "both", "sample_rate_hz": 30,
///                  "delimiter": ",", "trim": {"start": 0, "end": 9000}},
///       "audio":  {...}
///     },
///     "dyads": [
///       {"id": "dyad01", "condition": "lie",
///        "facial": {"sender": "dyad01/facial_sender.csv",
///                   "receiver": "dyad01/facial_receiver.csv"},
///        "audio":  {"sender": "...", "receiver": "..."}}
///     ]
///   }
///
/// Relative paths resolve against the manifest's directory. Omitted channel
/// lists fall back to the default facial/audio sets; "scope" is "sender" or
/// "both".
struct Manifest {
  std::map<std::string, ModalitySettings> modalities;
  std::vector<DyadEntry> dyads;
};

Manifest read_manifest(const std::filesystem::path& path);
void write_manifest(const Manifest& manifest,
                    const std::filesystem::path& path);

/// Returns a message per violated manifest invariant.
std::vector<std::string> validate_manifest(const Manifest& manifest);

/// Parses every referenced table and assembles one tensor per modality.
/// Errors are rethrown with the offending dyad id in the message.
LabeledDataset load_dataset(const Manifest& manifest, std::size_t jobs = 1);

}  // namespace dyadfuse::ingest
