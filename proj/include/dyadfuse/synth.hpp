#pragma once

// Seeded generator of synthetic dyadic corpora with planted class structure,
// and an exporter that writes them in the ingest input format.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <json.hpp>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dyadfuse/core.hpp"
#include "dyadfuse/ingest.hpp"

namespace dyadfuse::synth {

enum class SignalKind { MeanShift, FrequencyShift, Bursts };

std::string to_string(SignalKind kind);
SignalKind parse_signal_kind(const std::string& text);

/// Effect sizes are in units of the noise standard deviation.
///   MeanShift: Lie series step up by `effect` over their second half.
///   FrequencyShift: every series carries a sinusoid of amplitude `effect`;
///     Truth completes 4 cycles over the series, Lie 12.
///   Bursts: Lie series receive short rectangular bursts of height `effect`.
struct SynthModality {
  std::string name;
  std::size_t channels = 8;  // per participant
  std::size_t timesteps = 200;
  double sample_rate_hz = 1.0;
  SignalKind signal = SignalKind::MeanShift;
  double sender_effect = 0.0;
  double receiver_effect = 0.0;
  double informative_fraction = 0.2;
  // Per-participant column names; empty means "<name>_<k>".
  std::vector<std::string> channel_names;
};

struct SynthSpec {
  std::size_t n_dyads = 40;
  std::optional<std::size_t> n_lie;  // defaults to n_dyads / 2
  std::vector<SynthModality> modalities;
  double noise_sigma = 1.0;
  double ar_coefficient = 0.9;
  bool both_participants = true;
  std::uint64_t seed = 0;
};

/// Throws ConfigParse on an invalid spec.
void validate(const SynthSpec& spec);

/// Channels that carry the planted signal, as indices into the
/// per-participant channel list, keyed by modality.
struct GroundTruth {
  std::map<std::string, std::vector<std::size_t>> informative_channels;
};

struct SynthDataset {
  LabeledDataset dataset;
  GroundTruth truth;
};

/// The first round(fraction * channels) channels are informative (at least
/// one when the fraction is positive).
std::vector<std::size_t> informative_channels(const SynthModality& modality);

/// Base series are stationary AR(1) noise. Dyad d draws from
/// derive_seed(seed, d), so generation parallelizes over dyads without
/// changing the output.
SynthDataset generate(const SynthSpec& spec, std::size_t jobs = 1);

/// Writes `manifest.json` plus one CSV per dyad, modality and participant
/// under `directory`. Values use shortest round-trip formatting, so loading
/// the manifest reproduces the dataset bit for bit.
ingest::Manifest export_tables(const LabeledDataset& dataset,
                               const std::filesystem::path& directory);

/// JSON form:
///   {"n_dyads": 40, "n_lie": 20, "seed": 1, "noise_sigma": 1,
///    "ar_coefficient": 0.9, "both_participants": true,
///    "modalities": [{"name": "facial", "channels": 25, "timesteps": 2000,
///                    "sample_rate_hz": 30, "signal": "mean_shift",
///                    "sender_effect": 5, "receiver_effect": 0,
///                    "informative_fraction": 0.2,
///                    "channel_names": "default"}]}
/// "signal" is mean_shift, frequency_shift or bursts. "channel_names" is a
/// list, or "default" for the standard facial/audio column sets.
SynthSpec spec_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SynthSpec& spec);
SynthSpec read_spec(const std::filesystem::path& path);

}  // namespace dyadfuse::synth
