#include "dyadfuse/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <json.hpp>
#include <set>
#include <string_view>

#include "dyadfuse/parallel.hpp"

namespace dyadfuse::ingest {

namespace fs = std::filesystem;
using nlohmann::json;

std::string to_string(Scope scope) {
  return scope == Scope::Both ? "both" : "sender";
}

Scope parse_scope(const std::string& text) {
  if (text == "sender" || text == "sender_only" || text == "SenderOnly") {
    return Scope::SenderOnly;
  }
  if (text == "both" || text == "Both") return Scope::Both;
  throw Error(ErrorKind::ConfigParse, "unknown participant scope '" + text + "'");
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view line, char delimiter) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(delimiter, start);
    if (pos == std::string_view::npos) {
      fields.push_back(trim(line.substr(start)));
      return fields;
    }
    fields.push_back(trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
}

bool parse_double(std::string_view text, double& out) {
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc() && ptr == end && std::isfinite(out);
}

}  // namespace

RawFeatureTable parse_feature_table(const fs::path& path,
                                    const std::vector<std::string>& channels,
                                    char delimiter) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorKind::MissingInput, "cannot open '" + path.string() + "'");
  }
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) {
      have_header = true;
      break;
    }
  }
  if (!have_header) {
    throw Error(ErrorKind::EmptyFile, "'" + path.string() + "' has no header");
  }

  const auto header = split(line, delimiter);
  std::vector<std::size_t> source_columns;
  source_columns.reserve(channels.size());
  for (const auto& name : channels) {
    auto it = std::find(header.begin(), header.end(), std::string_view(name));
    if (it == header.end()) {
      throw Error(ErrorKind::MissingColumn,
                  "column '" + name + "' not found in '" + path.string() + "'");
    }
    source_columns.push_back(static_cast<std::size_t>(it - header.begin()));
  }

  RawFeatureTable table;
  table.columns = channels;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split(line, delimiter);
    if (fields.size() != header.size()) {
      throw Error(ErrorKind::MalformedRow,
                  "'" + path.string() + "' line " + std::to_string(line_no) +
                      ": expected " + std::to_string(header.size()) +
                      " fields, found " + std::to_string(fields.size()),
                  line_no);
    }
    for (std::size_t k = 0; k < source_columns.size(); ++k) {
      double value = 0.0;
      if (!parse_double(fields[source_columns[k]], value)) {
        throw Error(ErrorKind::MalformedRow,
                    "'" + path.string() + "' line " + std::to_string(line_no) +
                        ": column '" + channels[k] + "' is not a finite number",
                    line_no);
      }
      table.values.push_back(value);
    }
    ++table.rows;
  }
  return table;
}

ModalityTensor assemble_modality(const std::string& name,
                                 const std::vector<ParticipantTables>& dyads,
                                 Scope scope, double sample_rate_hz) {
  if (dyads.empty()) {
    throw Error(ErrorKind::ZeroLength, "modality '" + name + "' has no dyads");
  }
  const auto& columns = dyads.front().sender.columns;
  std::size_t length = std::numeric_limits<std::size_t>::max();
  for (std::size_t d = 0; d < dyads.size(); ++d) {
    const auto& entry = dyads[d];
    if (entry.sender.columns != columns) {
      throw Error(ErrorKind::ShapeMismatch,
                  "modality '" + name + "': dyad " + std::to_string(d) +
                      " has a different channel list");
    }
    length = std::min(length, entry.sender.rows);
    if (scope == Scope::Both) {
      if (!entry.receiver) {
        throw Error(ErrorKind::ScopeMismatch,
                    "modality '" + name + "': dyad " + std::to_string(d) +
                        " has no receiver table");
      }
      if (entry.receiver->columns != columns) {
        throw Error(ErrorKind::ShapeMismatch,
                    "modality '" + name + "': receiver channel list differs");
      }
      length = std::min(length, entry.receiver->rows);
    }
  }
  if (length == 0) {
    throw Error(ErrorKind::ZeroLength,
                "modality '" + name + "' has a table with no rows");
  }

  std::vector<std::string> channel_names;
  for (const auto& c : columns) channel_names.push_back("sender/" + c);
  if (scope == Scope::Both) {
    for (const auto& c : columns) channel_names.push_back("receiver/" + c);
  }

  const std::size_t per_participant = columns.size();
  std::vector<double> data;
  data.reserve(dyads.size() * channel_names.size() * length);
  auto append = [&](const RawFeatureTable& table) {
    for (std::size_t c = 0; c < per_participant; ++c) {
      for (std::size_t t = 0; t < length; ++t) data.push_back(table.at(t, c));
    }
  };
  for (const auto& entry : dyads) {
    append(entry.sender);
    if (scope == Scope::Both) append(*entry.receiver);
  }
  return ModalityTensor(name, dyads.size(), std::move(channel_names), length,
                        std::move(data), sample_rate_hz);
}

std::vector<std::string> default_facial_channels() {
  return {"AU01_r", "AU02_r", "AU04_r", "AU05_r", "AU06_r", "AU07_r",
          "AU09_r", "AU10_r", "AU12_r", "AU14_r", "AU15_r", "AU17_r",
          "AU20_r", "AU23_r", "AU25_r", "AU26_r", "AU45_r", "gaze_0_x",
          "gaze_0_y", "gaze_0_z", "gaze_1_x", "gaze_1_y", "gaze_1_z",
          "gaze_angle_x", "gaze_angle_y"};
}

std::vector<std::string> default_audio_channels() {
  return {"Loudness_sma3",
          "alphaRatio_sma3",
          "hammarbergIndex_sma3",
          "slope0-500_sma3",
          "slope500-1500_sma3",
          "spectralFlux_sma3",
          "mfcc1_sma3",
          "mfcc2_sma3",
          "mfcc3_sma3",
          "mfcc4_sma3",
          "F0semitoneFrom27.5Hz_sma3nz",
          "jitterLocal_sma3nz",
          "shimmerLocaldB_sma3nz",
          "HNRdBACF_sma3nz",
          "logRelF0-H1-H2_sma3nz",
          "logRelF0-H1-A3_sma3nz",
          "F1frequency_sma3nz",
          "F1bandwidth_sma3nz",
          "F1amplitudeLogRelF0_sma3nz",
          "F2frequency_sma3nz",
          "F2amplitudeLogRelF0_sma3nz",
          "F3frequency_sma3nz",
          "F3bandwidth_sma3nz",
          "F3amplitudeLogRelF0_sma3nz"};
}

namespace {

std::vector<std::string> default_channels_for(const std::string& modality) {
  if (modality == "facial") return default_facial_channels();
  if (modality == "audio") return default_audio_channels();
  throw Error(ErrorKind::ConfigParse,
              "modality '" + modality + "' needs an explicit channel list");
}

fs::path resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  auto it = j.find(key);
  return it == j.end() ? fallback : it->get<T>();
}

}  // namespace

Manifest read_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorKind::MissingInput,
                "cannot open manifest '" + path.string() + "'");
  }
  const fs::path base = path.parent_path();
  Manifest manifest;
  try {
    const json doc = json::parse(in);
    for (const auto& [name, m] : doc.at("modalities").items()) {
      ModalitySettings settings;
      settings.channels = m.contains("channels")
                              ? m.at("channels").get<std::vector<std::string>>()
                              : default_channels_for(name);
      settings.scope = parse_scope(get_or<std::string>(m, "scope", "both"));
      settings.sample_rate_hz = get_or<double>(m, "sample_rate_hz", 1.0);
      const auto delimiter = get_or<std::string>(m, "delimiter", ",");
      if (delimiter.size() != 1) {
        throw Error(ErrorKind::ConfigParse, "delimiter must be one character");
      }
      settings.delimiter = delimiter.front();
      if (m.contains("trim")) {
        const auto& trim_spec = m.at("trim");
        settings.trim_start = get_or<std::size_t>(trim_spec, "start", 0);
        if (trim_spec.contains("end") && !trim_spec.at("end").is_null()) {
          settings.trim_end = trim_spec.at("end").get<std::size_t>();
        }
      }
      manifest.modalities.emplace(name, std::move(settings));
    }
    for (const auto& d : doc.at("dyads")) {
      DyadEntry entry;
      entry.dyad_id = d.at("id").get<std::string>();
      entry.condition = parse_class_label(d.at("condition").get<std::string>());
      for (const auto& [name, settings] : manifest.modalities) {
        if (!d.contains(name)) continue;
        const auto& files = d.at(name);
        ParticipantPaths paths;
        paths.sender = resolve(base, files.at("sender").get<std::string>());
        if (files.contains("receiver") && !files.at("receiver").is_null()) {
          paths.receiver =
              resolve(base, files.at("receiver").get<std::string>());
        }
        entry.files.emplace(name, std::move(paths));
      }
      manifest.dyads.push_back(std::move(entry));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ConfigParse,
                "manifest '" + path.string() + "': " + e.what());
  }
  return manifest;
}

void write_manifest(const Manifest& manifest, const fs::path& path) {
  const fs::path base = path.parent_path();
  auto relative = [&](const fs::path& p) {
    const fs::path rel = p.lexically_relative(base);
    return (rel.empty() ? p : rel).generic_string();
  };
  json doc;
  doc["modalities"] = json::object();
  for (const auto& [name, s] : manifest.modalities) {
    json m;
    m["channels"] = s.channels;
    m["scope"] = to_string(s.scope);
    m["sample_rate_hz"] = s.sample_rate_hz;
    m["delimiter"] = std::string(1, s.delimiter);
    if (s.trim_start != 0 || s.trim_end) {
      m["trim"] = {{"start", s.trim_start},
                   {"end", s.trim_end ? json(*s.trim_end) : json(nullptr)}};
    }
    doc["modalities"][name] = std::move(m);
  }
  doc["dyads"] = json::array();
  for (const auto& d : manifest.dyads) {
    json entry;
    entry["id"] = d.dyad_id;
    entry["condition"] = std::string(to_string(d.condition));
    for (const auto& [name, paths] : d.files) {
      json files;
      files["sender"] = relative(paths.sender);
      if (paths.receiver) files["receiver"] = relative(*paths.receiver);
      entry[name] = std::move(files);
    }
    doc["dyads"].push_back(std::move(entry));
  }
  std::ofstream out(path);
  if (!out) {
    throw Error(ErrorKind::Io, "cannot write '" + path.string() + "'");
  }
  out << doc.dump(2) << '\n';
}

std::vector<std::string> validate_manifest(const Manifest& manifest) {
  std::vector<std::string> problems;
  if (manifest.modalities.empty()) problems.push_back("no modalities declared");
  for (const auto& [name, s] : manifest.modalities) {
    if (s.channels.empty()) {
      problems.push_back("modality '" + name + "': empty channel list");
    }
    if (s.trim_end && *s.trim_end <= s.trim_start) {
      problems.push_back("modality '" + name + "': empty trim window");
    }
  }
  std::set<std::string> ids;
  std::set<fs::path> paths;
  bool has_lie = false, has_truth = false;
  for (const auto& d : manifest.dyads) {
    if (!ids.insert(d.dyad_id).second) {
      problems.push_back("duplicate dyad id '" + d.dyad_id + "'");
    }
    has_lie |= d.condition == ClassLabel::Lie;
    has_truth |= d.condition == ClassLabel::Truth;
    std::set<fs::path> own;
    for (const auto& [name, settings] : manifest.modalities) {
      auto it = d.files.find(name);
      if (it == d.files.end()) {
        problems.push_back("dyad '" + d.dyad_id + "': no files for modality '" +
                           name + "'");
        continue;
      }
      if (settings.scope == Scope::Both && !it->second.receiver) {
        problems.push_back("dyad '" + d.dyad_id + "': modality '" + name +
                           "' has scope both but no receiver file");
      }
      auto note_path = [&](const fs::path& p) {
        if (!own.insert(p).second) {
          problems.push_back("dyad '" + d.dyad_id + "': repeated path " +
                             p.string());
        }
      };
      note_path(it->second.sender);
      if (it->second.receiver) note_path(*it->second.receiver);
    }
  }
  if (!manifest.dyads.empty() && !(has_lie && has_truth)) {
    problems.push_back("conditions do not cover both classes");
  }
  return problems;
}

namespace {

RawFeatureTable apply_trim(RawFeatureTable table, const ModalitySettings& s) {
  if (s.trim_start == 0 && !s.trim_end) return table;
  const std::size_t end = std::min(table.rows, s.trim_end.value_or(table.rows));
  const std::size_t start = std::min(s.trim_start, end);
  const std::size_t width = table.columns.size();
  RawFeatureTable out;
  out.columns = std::move(table.columns);
  out.rows = end - start;
  out.values.assign(table.values.begin() + start * width,
                    table.values.begin() + end * width);
  return out;
}

}  // namespace

LabeledDataset load_dataset(const Manifest& manifest, std::size_t jobs) {
  if (const auto problems = validate_manifest(manifest); !problems.empty()) {
    throw Error(ErrorKind::ConfigParse, "invalid manifest: " + problems.front());
  }
  LabeledDataset dataset;
  for (const auto& d : manifest.dyads) {
    dataset.dyad_ids.push_back(d.dyad_id);
    dataset.labels.push_back(d.condition);
  }
  for (const auto& [name, settings] : manifest.modalities) {
    std::vector<ParticipantTables> tables(manifest.dyads.size());
    parallel_for(manifest.dyads.size(), jobs, [&](std::size_t i) {
      const auto& dyad = manifest.dyads[i];
      const auto& paths = dyad.files.at(name);
      try {
        tables[i].sender = apply_trim(
            parse_feature_table(paths.sender, settings.channels,
                                settings.delimiter),
            settings);
        if (settings.scope == Scope::Both) {
          tables[i].receiver = apply_trim(
              parse_feature_table(*paths.receiver, settings.channels,
                                  settings.delimiter),
              settings);
        }
      } catch (const Error& e) {
        throw Error(e.kind(), "dyad '" + dyad.dyad_id + "': " + e.detail(),
                    e.location());
      }
    });
    try {
      dataset.modalities.emplace(
          name, assemble_modality(name, tables, settings.scope,
                                  settings.sample_rate_hz));
    } catch (const Error& e) {
      throw Error(e.kind(), "modality '" + name + "': " + e.detail(),
                  e.location());
    }
  }
  return dataset;
}

}  // namespace dyadfuse::ingest
