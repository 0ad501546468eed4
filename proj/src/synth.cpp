#include "dyadfuse/synth.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>

#include "dyadfuse/model_io.hpp"
#include "dyadfuse/parallel.hpp"
#include "dyadfuse/rng.hpp"

namespace dyadfuse::synth {

using nlohmann::json;

namespace {

constexpr const char* kSenderPrefix = "sender/";
constexpr const char* kReceiverPrefix = "receiver/";
constexpr double kTruthCycles = 4.0;
constexpr double kLieCycles = 12.0;

std::vector<std::string> column_names(const SynthModality& m) {
  if (!m.channel_names.empty()) return m.channel_names;
  std::vector<std::string> names;
  for (std::size_t c = 0; c < m.channels; ++c) {
    names.push_back(m.name + "_" + std::to_string(c));
  }
  return names;
}

void add_noise(std::span<double> out, double sigma, double phi, Rng& rng) {
  const double innovation = sigma * std::sqrt(1.0 - phi * phi);
  double x = sigma * rng.normal();
  for (auto& v : out) {
    v = x;
    x = phi * x + innovation * rng.normal();
  }
}

void plant(std::span<double> out, SignalKind kind, double effect, bool lie,
           Rng& rng) {
  const std::size_t n = out.size();
  switch (kind) {
    case SignalKind::MeanShift:
      if (lie) {
        for (std::size_t t = n / 2; t < n; ++t) out[t] += effect;
      }
      break;
    case SignalKind::FrequencyShift: {
      const double cycles = lie ? kLieCycles : kTruthCycles;
      const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
      for (std::size_t t = 0; t < n; ++t) {
        out[t] += effect * std::sin(2.0 * std::numbers::pi * cycles *
                                        static_cast<double>(t) /
                                        static_cast<double>(n) +
                                    phase);
      }
      break;
    }
    case SignalKind::Bursts: {
      if (!lie) break;
      const std::size_t count = std::max<std::size_t>(1, n / 100);
      const std::size_t width = std::max<std::size_t>(2, n / 40);
      for (std::size_t b = 0; b < count; ++b) {
        const std::size_t start = rng.index(n - std::min(width, n) + 1);
        for (std::size_t t = start; t < std::min(n, start + width); ++t) {
          out[t] += effect;
        }
      }
      break;
    }
  }
}

std::string shortest(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace

std::string to_string(SignalKind kind) {
  switch (kind) {
    case SignalKind::MeanShift: return "mean_shift";
    case SignalKind::FrequencyShift: return "frequency_shift";
    case SignalKind::Bursts: return "bursts";
  }
  return "unknown";
}

SignalKind parse_signal_kind(const std::string& text) {
  if (text == "mean_shift") return SignalKind::MeanShift;
  if (text == "frequency_shift") return SignalKind::FrequencyShift;
  if (text == "bursts") return SignalKind::Bursts;
  throw Error(ErrorKind::ConfigParse, "unknown signal kind '" + text + "'");
}

void validate(const SynthSpec& spec) {
  auto fail = [](const std::string& msg) {
    throw Error(ErrorKind::ConfigParse, msg);
  };
  if (spec.n_dyads < 2) fail("n_dyads must be >= 2");
  if (spec.n_lie && *spec.n_lie > spec.n_dyads) fail("n_lie exceeds n_dyads");
  if (spec.modalities.empty()) fail("at least one modality is required");
  if (!(spec.noise_sigma > 0.0)) fail("noise_sigma must be positive");
  if (!(std::abs(spec.ar_coefficient) < 1.0)) {
    fail("ar_coefficient must lie in (-1, 1)");
  }
  std::vector<std::string> seen;
  for (const auto& m : spec.modalities) {
    if (m.name.empty()) fail("modality name is empty");
    if (std::find(seen.begin(), seen.end(), m.name) != seen.end()) {
      fail("duplicate modality '" + m.name + "'");
    }
    seen.push_back(m.name);
    if (m.channels == 0) fail(m.name + ": channels must be positive");
    if (m.timesteps == 0) fail(m.name + ": timesteps must be positive");
    if (!(m.sample_rate_hz > 0.0)) fail(m.name + ": sample rate must be positive");
    if (!(m.sender_effect >= 0.0) || !(m.receiver_effect >= 0.0)) {
      fail(m.name + ": effect sizes must be >= 0");
    }
    if (!(m.informative_fraction >= 0.0 && m.informative_fraction <= 1.0)) {
      fail(m.name + ": informative_fraction must lie in [0, 1]");
    }
    if (!m.channel_names.empty() && m.channel_names.size() != m.channels) {
      fail(m.name + ": channel_names length differs from channels");
    }
  }
}

std::vector<std::size_t> informative_channels(const SynthModality& m) {
  if (m.informative_fraction <= 0.0) return {};
  const auto count = std::clamp<std::size_t>(
      static_cast<std::size_t>(
          std::llround(m.informative_fraction * static_cast<double>(m.channels))),
      1, m.channels);
  std::vector<std::size_t> out(count);
  for (std::size_t c = 0; c < count; ++c) out[c] = c;
  return out;
}

SynthDataset generate(const SynthSpec& spec, std::size_t jobs) {
  validate(spec);
  const std::size_t n = spec.n_dyads;
  const std::size_t n_lie = spec.n_lie.value_or(n / 2);

  std::vector<ClassLabel> labels(n, ClassLabel::Truth);
  std::fill_n(labels.begin(), n_lie, ClassLabel::Lie);
  Rng label_rng(derive_seed(spec.seed, "labels"));
  for (std::size_t i = n; i > 1; --i) {
    std::swap(labels[i - 1], labels[label_rng.index(i)]);
  }

  SynthDataset out;
  out.dataset.labels = labels;
  for (std::size_t d = 0; d < n; ++d) {
    char id[32];
    std::snprintf(id, sizeof id, "dyad%02zu", d + 1);
    out.dataset.dyad_ids.emplace_back(id);
  }

  const std::size_t roles = spec.both_participants ? 2 : 1;
  std::vector<std::vector<double>> buffers;
  for (const auto& m : spec.modalities) {
    buffers.emplace_back(n * roles * m.channels * m.timesteps);
    out.truth.informative_channels[m.name] = informative_channels(m);
  }

  parallel_for(n, jobs, [&](std::size_t d) {
    const std::uint64_t dyad_seed = derive_seed(spec.seed, d);
    const bool lie = labels[d] == ClassLabel::Lie;
    for (std::size_t k = 0; k < spec.modalities.size(); ++k) {
      const auto& m = spec.modalities[k];
      const auto& informative = out.truth.informative_channels.at(m.name);
      Rng rng(derive_seed(dyad_seed, m.name));
      const std::size_t width = roles * m.channels;
      for (std::size_t role = 0; role < roles; ++role) {
        const double effect = role == 0 ? m.sender_effect : m.receiver_effect;
        for (std::size_t c = 0; c < m.channels; ++c) {
          std::span<double> series(
              buffers[k].data() + (d * width + role * m.channels + c) * m.timesteps,
              m.timesteps);
          add_noise(series, spec.noise_sigma, spec.ar_coefficient, rng);
          const bool carries =
              std::binary_search(informative.begin(), informative.end(), c);
          if (carries) {
            plant(series, m.signal, effect * spec.noise_sigma, lie, rng);
          }
        }
      }
    }
  });

  for (std::size_t k = 0; k < spec.modalities.size(); ++k) {
    const auto& m = spec.modalities[k];
    const auto names = column_names(m);
    std::vector<std::string> channels;
    for (const auto& name : names) channels.push_back(kSenderPrefix + name);
    if (spec.both_participants) {
      for (const auto& name : names) channels.push_back(kReceiverPrefix + name);
    }
    out.dataset.modalities.emplace(
        m.name, ModalityTensor(m.name, n, std::move(channels), m.timesteps,
                               std::move(buffers[k]), m.sample_rate_hz));
  }
  return out;
}

ingest::Manifest export_tables(const LabeledDataset& dataset,
                               const std::filesystem::path& directory) {
  namespace fs = std::filesystem;
  if (const auto problems = validate_dataset(dataset); !problems.empty()) {
    throw Error(ErrorKind::ShapeMismatch, "cannot export: " + problems.front());
  }
  std::error_code ec;
  fs::create_directories(directory, ec);
  if (ec) {
    throw Error(ErrorKind::Io,
                "cannot create '" + directory.string() + "': " + ec.message());
  }

  ingest::Manifest manifest;
  for (std::size_t d = 0; d < dataset.size(); ++d) {
    manifest.dyads.push_back({dataset.dyad_ids[d], dataset.labels[d], {}});
  }

  const std::string sender_prefix = kSenderPrefix;
  const std::string receiver_prefix = kReceiverPrefix;
  for (const auto& [name, tensor] : dataset.modalities) {
    std::vector<std::size_t> sender_cols;
    std::vector<std::size_t> receiver_cols;
    std::vector<std::string> columns;
    for (std::size_t c = 0; c < tensor.channels(); ++c) {
      const auto& ch = tensor.channel_names()[c];
      if (ch.starts_with(sender_prefix)) {
        sender_cols.push_back(c);
        columns.push_back(ch.substr(sender_prefix.size()));
      } else if (ch.starts_with(receiver_prefix)) {
        receiver_cols.push_back(c);
      } else {
        throw Error(ErrorKind::ShapeMismatch,
                    name + ": channel '" + ch + "' has no participant prefix");
      }
    }
    const bool both = !receiver_cols.empty();
    if (both && receiver_cols.size() != sender_cols.size()) {
      throw Error(ErrorKind::ScopeMismatch,
                  name + ": sender and receiver channel counts differ");
    }
    ingest::ModalitySettings settings;
    settings.channels = columns;
    settings.scope = both ? ingest::Scope::Both : ingest::Scope::SenderOnly;
    settings.sample_rate_hz = tensor.sample_rate_hz();
    manifest.modalities.emplace(name, settings);

    auto write_table = [&](std::size_t d, const std::vector<std::size_t>& cols,
                           const std::string& role) {
      const fs::path relative =
          fs::path(dataset.dyad_ids[d]) / (name + "_" + role + ".csv");
      fs::create_directories(directory / relative.parent_path());
      std::ofstream file(directory / relative);
      if (!file) {
        throw Error(ErrorKind::Io,
                    "cannot write '" + (directory / relative).string() + "'");
      }
      file << "frame";
      for (const auto& col : columns) file << ',' << col;
      file << '\n';
      for (std::size_t t = 0; t < tensor.timesteps(); ++t) {
        file << t + 1;
        for (auto c : cols) file << ',' << shortest(tensor.at(d, c, t));
        file << '\n';
      }
      return directory / relative;
    };
    for (std::size_t d = 0; d < dataset.size(); ++d) {
      ingest::ParticipantPaths paths;
      paths.sender = write_table(d, sender_cols, "sender");
      if (both) paths.receiver = write_table(d, receiver_cols, "receiver");
      manifest.dyads[d].files.emplace(name, std::move(paths));
    }
  }
  ingest::write_manifest(manifest, directory / "manifest.json");
  return manifest;
}

SynthSpec spec_from_json(const json& j) {
  try {
    SynthSpec spec;
    spec.n_dyads = j.value("n_dyads", spec.n_dyads);
    if (j.contains("n_lie") && !j.at("n_lie").is_null()) {
      spec.n_lie = j.at("n_lie").get<std::size_t>();
    }
    spec.noise_sigma = j.value("noise_sigma", spec.noise_sigma);
    spec.ar_coefficient = j.value("ar_coefficient", spec.ar_coefficient);
    spec.both_participants = j.value("both_participants", spec.both_participants);
    spec.seed = j.value("seed", spec.seed);
    for (const auto& mj : j.at("modalities")) {
      SynthModality m;
      m.name = mj.at("name").get<std::string>();
      m.channels = mj.value("channels", m.channels);
      m.timesteps = mj.value("timesteps", m.timesteps);
      m.sample_rate_hz = mj.value("sample_rate_hz", m.sample_rate_hz);
      m.signal = parse_signal_kind(mj.value("signal", std::string("mean_shift")));
      m.sender_effect = mj.value("sender_effect", m.sender_effect);
      m.receiver_effect = mj.value("receiver_effect", m.receiver_effect);
      m.informative_fraction =
          mj.value("informative_fraction", m.informative_fraction);
      if (mj.contains("channel_names")) {
        const auto& names = mj.at("channel_names");
        if (names.is_string() && names.get<std::string>() == "default") {
          if (m.name == "facial") {
            m.channel_names = ingest::default_facial_channels();
          } else if (m.name == "audio") {
            m.channel_names = ingest::default_audio_channels();
          } else {
            throw Error(ErrorKind::ConfigParse,
                        m.name + ": no default channel names");
          }
          if (!mj.contains("channels")) m.channels = m.channel_names.size();
        } else {
          m.channel_names = names.get<std::vector<std::string>>();
        }
      }
      spec.modalities.push_back(std::move(m));
    }
    validate(spec);
    return spec;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ConfigParse, std::string("synth spec: ") + e.what());
  }
}

json to_json(const SynthSpec& spec) {
  json modalities = json::array();
  for (const auto& m : spec.modalities) {
    json mj = {{"name", m.name},
               {"channels", m.channels},
               {"timesteps", m.timesteps},
               {"sample_rate_hz", m.sample_rate_hz},
               {"signal", to_string(m.signal)},
               {"sender_effect", m.sender_effect},
               {"receiver_effect", m.receiver_effect},
               {"informative_fraction", m.informative_fraction}};
    if (!m.channel_names.empty()) mj["channel_names"] = m.channel_names;
    modalities.push_back(std::move(mj));
  }
  json j = {{"n_dyads", spec.n_dyads},
            {"noise_sigma", spec.noise_sigma},
            {"ar_coefficient", spec.ar_coefficient},
            {"both_participants", spec.both_participants},
            {"seed", spec.seed},
            {"modalities", std::move(modalities)}};
  if (spec.n_lie) j["n_lie"] = *spec.n_lie;
  return j;
}

SynthSpec read_spec(const std::filesystem::path& path) {
  return spec_from_json(classify::load_json(path));
}

}  // namespace dyadfuse::synth
