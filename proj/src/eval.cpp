#include "dyadfuse/eval.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "dyadfuse/rng.hpp"

namespace dyadfuse::eval {

std::string to_string(Mode mode) {
  switch (mode) {
    case Mode::Unimodal: return "unimodal";
    case Mode::EarlyFusion: return "early";
    case Mode::LateFusion: return "late";
  }
  return "unknown";
}

std::string to_string(ClassifierKind kind) {
  return kind == ClassifierKind::Rocket ? "rocket" : "interval-forest";
}

Mode parse_mode(const std::string& text) {
  if (text == "unimodal") return Mode::Unimodal;
  if (text == "early" || text == "early_fusion") return Mode::EarlyFusion;
  if (text == "late" || text == "late_fusion") return Mode::LateFusion;
  throw Error(ErrorKind::ConfigParse, "unknown mode '" + text + "'");
}

ClassifierKind parse_classifier(const std::string& text) {
  if (text == "rocket") return ClassifierKind::Rocket;
  if (text == "interval-forest" || text == "interval_forest") {
    return ClassifierKind::IntervalForest;
  }
  throw Error(ErrorKind::ConfigParse, "unknown classifier '" + text + "'");
}

namespace {

std::string scope_word(Scope scope) {
  return scope == Scope::Both ? "Both" : "Sender";
}

std::string modality_word(const std::string& modality) {
  return modality == fusion::kFacial ? "Facial Expressions" : "Voice";
}

}  // namespace

std::size_t default_early_timesteps(const LabeledDataset& dataset) {
  std::size_t shortest = kMaxEarlyTimesteps;
  for (const auto& [name, tensor] : dataset.modalities) {
    shortest = std::min(shortest, tensor.timesteps());
  }
  return shortest;
}

std::string ExperimentSpec::key() const {
  const std::string pair = "voice_" + ingest::to_string(audio_scope) +
                           "-facial_" + ingest::to_string(facial_scope);
  switch (mode) {
    case Mode::Unimodal:
      return "unimodal-" + modality + "-" + ingest::to_string(scope()) + "-" +
             eval::to_string(classifier);
    case Mode::EarlyFusion:
      return "early-" + pair + "-" +
             (summarization.method == transform::SummaryMethod::Paa ? "paa"
                                                                     : "sax");
    case Mode::LateFusion:
      return "late-" + pair;
  }
  return "unknown";
}

ConfigDescriptor ExperimentSpec::descriptor() const {
  const std::string pair = "Voice: " + scope_word(audio_scope) +
                           " / Facial Expressions: " + scope_word(facial_scope);
  switch (mode) {
    case Mode::Unimodal:
      return {modality_word(modality), scope_word(scope()),
              classifier == ClassifierKind::Rocket ? "Rocket"
                                                   : "Interval Forest"};
    case Mode::EarlyFusion:
      return {"Multimodal Early Fusion", pair,
              summarization.method == transform::SummaryMethod::Paa
                  ? "Rocket with PAA"
                  : "Rocket with SAX"};
    case Mode::LateFusion:
      return {"Multimodal Late Fusion", pair, "Decision Tree"};
  }
  return {};
}

void validate(const ExperimentSpec& spec) {
  if (spec.mode == Mode::Unimodal && spec.modality != fusion::kFacial &&
      spec.modality != fusion::kAudio) {
    throw Error(ErrorKind::ConfigParse,
                "unknown modality '" + spec.modality + "'");
  }
  if (spec.mode != Mode::Unimodal &&
      spec.classifier != ClassifierKind::Rocket) {
    throw Error(ErrorKind::ConfigParse,
                "fusion experiments use the kernel classifier only");
  }
  if (spec.mode == Mode::LateFusion && spec.meta_max_depth == 0) {
    throw Error(ErrorKind::ConfigParse, "meta tree depth must be >= 1");
  }
  if (spec.summarization.method == transform::SummaryMethod::Sax &&
      spec.summarization.alphabet_size < 2) {
    throw Error(ErrorKind::ConfigParse, "SAX alphabet size must be >= 2");
  }
}

Metrics compute_metrics(std::span<const ClassLabel> predictions,
                        std::span<const ClassLabel> labels) {
  if (predictions.size() != labels.size() || predictions.empty()) {
    throw Error(ErrorKind::LengthMismatch,
                std::to_string(predictions.size()) + " predictions for " +
                    std::to_string(labels.size()) + " labels");
  }
  Metrics m;
  auto& c = m.confusion;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const bool lie = labels[i] == ClassLabel::Lie;
    const bool said_lie = predictions[i] == ClassLabel::Lie;
    if (lie && said_lie) ++c.tp;
    if (lie && !said_lie) ++c.fn;
    if (!lie && said_lie) ++c.fp;
    if (!lie && !said_lie) ++c.tn;
  }
  auto ratio = [](std::size_t num, std::size_t den, bool& undefined) {
    undefined = den == 0;
    return undefined ? 0.0
                     : static_cast<double>(num) / static_cast<double>(den);
  };
  m.precision_lie = ratio(c.tp, c.tp + c.fp, m.precision_lie_undefined);
  m.precision_truth = ratio(c.tn, c.tn + c.fn, m.precision_truth_undefined);
  m.recall_lie = ratio(c.tp, c.tp + c.fn, m.recall_lie_undefined);
  m.recall_truth = ratio(c.tn, c.tn + c.fp, m.recall_truth_undefined);
  m.accuracy = static_cast<double>(c.tp + c.tn) /
               static_cast<double>(c.total());
  return m;
}

EvalReport run_experiment(const LabeledDataset& dataset,
                          const ExperimentSpec& spec, std::size_t jobs) {
  validate(spec);
  if (const auto problems = validate_dataset(dataset); !problems.empty()) {
    throw Error(ErrorKind::ShapeMismatch, "invalid dataset: " + problems.front());
  }
  const auto& labels = dataset.labels;

  auto prepared = [&](const std::string& modality, Scope scope) {
    auto tensor = fusion::select_scope(dataset.modality(modality), scope);
    return spec.normalize ? transform::znorm(tensor) : tensor;
  };
  auto base_seed = [&](const std::string& stream) {
    return derive_seed(spec.seed, stream);
  };
  fusion::ClassifierSpec rocket = fusion::RocketSpec{spec.num_kernels, {}};
  std::get<fusion::RocketSpec>(rocket).alphas = classify::default_alpha_grid();

  ScoreMatrix scores;
  std::vector<ClassLabel> predicted;
  switch (spec.mode) {
    case Mode::Unimodal: {
      const fusion::ClassifierSpec classifier =
          spec.classifier == ClassifierKind::Rocket
              ? rocket
              : fusion::ClassifierSpec(fusion::IntervalForestSpec{spec.n_trees});
      scores = fusion::collect_oof_scores(prepared(spec.modality, spec.scope()),
                                          labels, classifier,
                                          base_seed(spec.modality), jobs);
      predicted = scores.predictions();
      break;
    }
    case Mode::EarlyFusion: {
      LabeledDataset normalized;
      normalized.dyad_ids = dataset.dyad_ids;
      normalized.labels = labels;
      normalized.modalities.emplace(
          fusion::kFacial, prepared(fusion::kFacial, spec.facial_scope));
      normalized.modalities.emplace(
          fusion::kAudio, prepared(fusion::kAudio, spec.audio_scope));
      fusion::FusionConfig config;
      config.facial_scope = spec.facial_scope;
      config.audio_scope = spec.audio_scope;
      config.early = spec.summarization;
      if (config.early.target_timesteps == 0) {
        config.early.target_timesteps = default_early_timesteps(dataset);
      }
      scores = fusion::collect_oof_scores(
          fusion::early_fuse(normalized, config), labels, rocket,
          base_seed("early"), jobs);
      predicted = scores.predictions();
      break;
    }
    case Mode::LateFusion: {
      const ScoreMatrix bases[] = {
          fusion::collect_oof_scores(
              prepared(fusion::kFacial, spec.facial_scope), labels, rocket,
              base_seed(fusion::kFacial), jobs),
          fusion::collect_oof_scores(prepared(fusion::kAudio, spec.audio_scope),
                                     labels, rocket, base_seed(fusion::kAudio),
                                     jobs)};
      auto late = fusion::late_fuse(bases, labels, spec.meta_max_depth, jobs);
      scores = std::move(late.meta_scores);
      predicted = std::move(late.predictions);
      break;
    }
  }

  EvalReport report;
  report.key = spec.key();
  report.config = spec.descriptor();
  report.seed = spec.seed;
  report.metrics = compute_metrics(predicted, labels);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    report.predictions.push_back(
        {dataset.dyad_ids[i], labels[i], predicted[i], scores.rows[i]});
  }
  return report;
}

std::vector<ExperimentSpec> default_sweep(std::uint64_t seed,
                                          std::size_t num_kernels,
                                          std::size_t n_trees,
                                          std::size_t early_timesteps,
                                          std::size_t alphabet_size) {
  std::vector<ExperimentSpec> specs;
  const Scope scopes[] = {Scope::SenderOnly, Scope::Both};
  auto base = [&] {
    ExperimentSpec s;
    s.seed = seed;
    s.num_kernels = num_kernels;
    s.n_trees = n_trees;
    return s;
  };
  for (const char* modality : {fusion::kAudio, fusion::kFacial}) {
    for (Scope scope : scopes) {
      for (ClassifierKind kind :
           {ClassifierKind::Rocket, ClassifierKind::IntervalForest}) {
        auto s = base();
        s.mode = Mode::Unimodal;
        s.modality = modality;
        (s.modality == fusion::kFacial ? s.facial_scope : s.audio_scope) =
            scope;
        s.classifier = kind;
        specs.push_back(s);
      }
    }
  }
  for (Scope audio : scopes) {
    for (Scope facial : scopes) {
      for (auto method :
           {transform::SummaryMethod::Paa, transform::SummaryMethod::Sax}) {
        auto s = base();
        s.mode = Mode::EarlyFusion;
        s.audio_scope = audio;
        s.facial_scope = facial;
        s.summarization.method = method;
        s.summarization.target_timesteps = early_timesteps;
        s.summarization.alphabet_size = alphabet_size;
        specs.push_back(s);
      }
    }
  }
  for (Scope audio : scopes) {
    for (Scope facial : scopes) {
      auto s = base();
      s.mode = Mode::LateFusion;
      s.audio_scope = audio;
      s.facial_scope = facial;
      specs.push_back(s);
    }
  }
  return specs;
}

double round_half_up(double value, int decimals) {
  const double scale = std::pow(10.0, decimals);
  return std::floor(value * scale + 0.5 + 1e-9) / scale;
}

namespace {

std::string fixed2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", round_half_up(v, 2));
  return buf;
}

std::string full_precision(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        current += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        current += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(current));
      current.clear();
    } else if (c != '\r') {
      current += c;
    }
  }
  fields.push_back(std::move(current));
  return fields;
}

constexpr const char* kCsvHeader =
    "key,modality,participants,method,seed,n,tp_lie,fn_lie,fp_lie,tn_lie,"
    "precision_lie,precision_truth,recall_lie,recall_truth,accuracy,undefined";

std::string undefined_flags(const Metrics& m) {
  std::vector<std::string> flags;
  if (m.precision_lie_undefined) flags.push_back("precision_lie");
  if (m.precision_truth_undefined) flags.push_back("precision_truth");
  if (m.recall_lie_undefined) flags.push_back("recall_lie");
  if (m.recall_truth_undefined) flags.push_back("recall_truth");
  std::string out;
  for (const auto& f : flags) out += (out.empty() ? "" : "|") + f;
  return out;
}

}  // namespace

std::string format_table(std::span<const EvalReport> reports) {
  const std::vector<std::string> header = {
      "Modality",        "Participants",   "Method",
      "Precision Lie",   "Precision Truth", "Recall Lie",
      "Recall Truth",    "Accuracy"};
  std::vector<std::vector<std::string>> rows;
  for (const auto& r : reports) {
    const auto& m = r.metrics;
    rows.push_back({r.config.modality, r.config.participants, r.config.method,
                    fixed2(m.precision_lie), fixed2(m.precision_truth),
                    fixed2(m.recall_lie), fixed2(m.recall_truth),
                    fixed2(m.accuracy)});
  }
  std::vector<std::size_t> width(header.size());
  for (std::size_t c = 0; c < header.size(); ++c) {
    width[c] = header[c].size();
    for (const auto& row : rows) width[c] = std::max(width[c], row[c].size());
  }
  std::ostringstream out;
  auto emit = [&](const std::vector<std::string>& row) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out << "  ";
      // Text columns left-aligned, numbers right-aligned.
      if (c < 3) {
        out << row[c] << std::string(width[c] - row[c].size(), ' ');
      } else {
        out << std::string(width[c] - row[c].size(), ' ') << row[c];
      }
    }
    out << '\n';
  };
  emit(header);
  std::size_t total = 0;
  for (auto w : width) total += w;
  out << std::string(total + 2 * (width.size() - 1), '-') << '\n';
  for (const auto& row : rows) emit(row);
  return out.str();
}

std::string format_csv(std::span<const EvalReport> reports) {
  std::ostringstream out;
  out << kCsvHeader << '\n';
  for (const auto& r : reports) {
    const auto& m = r.metrics;
    out << csv_field(r.key) << ',' << csv_field(r.config.modality) << ','
        << csv_field(r.config.participants) << ','
        << csv_field(r.config.method) << ',' << r.seed << ','
        << m.confusion.total() << ',' << m.confusion.tp << ','
        << m.confusion.fn << ',' << m.confusion.fp << ',' << m.confusion.tn
        << ',' << full_precision(m.precision_lie) << ','
        << full_precision(m.precision_truth) << ','
        << full_precision(m.recall_lie) << ','
        << full_precision(m.recall_truth) << ','
        << full_precision(m.accuracy) << ',' << undefined_flags(m) << '\n';
  }
  return out.str();
}

std::vector<EvalReport> parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || split_csv_line(line).size() != 16) {
    throw Error(ErrorKind::ConfigParse, "report CSV lacks the expected header");
  }
  std::vector<EvalReport> reports;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto f = split_csv_line(line);
    if (f.size() != 16) {
      throw Error(ErrorKind::MalformedRow,
                  "report CSV line " + std::to_string(line_no), line_no);
    }
    try {
      EvalReport r;
      r.key = f[0];
      r.config = {f[1], f[2], f[3]};
      r.seed = std::stoull(f[4]);
      auto& m = r.metrics;
      m.confusion = {std::stoull(f[6]), std::stoull(f[7]), std::stoull(f[8]),
                     std::stoull(f[9])};
      m.precision_lie = std::stod(f[10]);
      m.precision_truth = std::stod(f[11]);
      m.recall_lie = std::stod(f[12]);
      m.recall_truth = std::stod(f[13]);
      m.accuracy = std::stod(f[14]);
      const std::string& flags = f[15];
      m.precision_lie_undefined =
          flags.find("precision_lie") != std::string::npos;
      m.precision_truth_undefined =
          flags.find("precision_truth") != std::string::npos;
      m.recall_lie_undefined = flags.find("recall_lie") != std::string::npos;
      m.recall_truth_undefined =
          flags.find("recall_truth") != std::string::npos;
      reports.push_back(std::move(r));
    } catch (const std::logic_error&) {
      throw Error(ErrorKind::MalformedRow,
                  "report CSV line " + std::to_string(line_no), line_no);
    }
  }
  return reports;
}

std::string format_predictions(const EvalReport& report) {
  std::ostringstream out;
  out << "dyad_id,label,predicted,score_lie,score_truth\n";
  for (const auto& p : report.predictions) {
    out << csv_field(p.dyad_id) << ',' << to_string(p.label) << ','
        << to_string(p.predicted) << ',' << full_precision(p.scores[0]) << ','
        << full_precision(p.scores[1]) << '\n';
  }
  return out.str();
}

}  // namespace dyadfuse::eval
