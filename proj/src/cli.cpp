#include "dyadfuse/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>

#include "dyadfuse/ingest.hpp"
#include "dyadfuse/model_io.hpp"
#include "dyadfuse/parallel.hpp"

namespace dyadfuse::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

transform::SummaryMethod parse_method(const std::string& text) {
  if (text == "paa") return transform::SummaryMethod::Paa;
  if (text == "sax") return transform::SummaryMethod::Sax;
  throw Error(ErrorKind::ConfigParse, "unknown summarization '" + text + "'");
}

transform::SaxBinning parse_binning(const std::string& text) {
  if (text == "equal_width") return transform::SaxBinning::EqualWidth;
  if (text == "gaussian") return transform::SaxBinning::Gaussian;
  throw Error(ErrorKind::ConfigParse, "unknown SAX binning '" + text + "'");
}

std::vector<eval::ExperimentSpec> parse_experiments(const json& list,
                                                    const eval::ExperimentSpec& base) {
  std::vector<eval::ExperimentSpec> out;
  for (const auto& e : list) {
    eval::ExperimentSpec spec = base;
    spec.mode = eval::parse_mode(e.at("mode").get<std::string>());
    spec.modality = e.value("modality", spec.modality);
    if (e.contains("facial_scope")) {
      spec.facial_scope = ingest::parse_scope(e.at("facial_scope").get<std::string>());
    }
    if (e.contains("audio_scope")) {
      spec.audio_scope = ingest::parse_scope(e.at("audio_scope").get<std::string>());
    }
    if (e.contains("classifier")) {
      spec.classifier = eval::parse_classifier(e.at("classifier").get<std::string>());
    }
    if (e.contains("summarization")) {
      const auto& s = e.at("summarization");
      spec.summarization.method = parse_method(s.value("method", std::string("paa")));
      spec.summarization.target_timesteps =
          s.value("target_timesteps", spec.summarization.target_timesteps);
      spec.summarization.alphabet_size =
          s.value("alphabet_size", spec.summarization.alphabet_size);
      spec.summarization.binning =
          parse_binning(s.value("binning", std::string("equal_width")));
    }
    spec.num_kernels = e.value("num_kernels", spec.num_kernels);
    spec.n_trees = e.value("n_trees", spec.n_trees);
    spec.meta_max_depth = e.value("meta_max_depth", spec.meta_max_depth);
    spec.normalize = e.value("normalize", spec.normalize);
    eval::validate(spec);
    const auto seeds = e.value("seeds", std::vector<std::uint64_t>{base.seed});
    if (seeds.empty()) throw Error(ErrorKind::ConfigParse, "empty seed list");
    for (auto seed : seeds) {
      spec.seed = seed;
      out.push_back(spec);
    }
  }
  return out;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) {
    throw Error(ErrorKind::Io, "cannot write '" + path.string() + "'");
  }
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::MissingInput, "cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void ensure_directory(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw Error(ErrorKind::Io, "cannot create '" + dir.string() + "'");
  }
}

}  // namespace

RunConfig read_run_config(const fs::path& path, const Overrides& overrides) {
  const json j = classify::load_json(path);
  const fs::path base_dir = path.parent_path();
  auto resolve = [&](const std::string& p) {
    const fs::path candidate(p);
    return candidate.is_absolute() ? candidate : base_dir / candidate;
  };
  try {
    RunConfig config;
    const bool has_manifest = j.contains("manifest");
    const bool has_synth = j.contains("synth");
    if (has_manifest == has_synth) {
      throw Error(ErrorKind::ConfigParse,
                  path.string() + ": exactly one of \"manifest\" or \"synth\" is required");
    }
    if (has_manifest) {
      const fs::path manifest = resolve(j.at("manifest").get<std::string>());
      if (!fs::exists(manifest)) {
        throw Error(ErrorKind::MissingInput, "manifest '" + manifest.string() + "' not found");
      }
      config.source = manifest;
    } else if (j.at("synth").is_object()) {
      config.source = synth::spec_from_json(j.at("synth"));
    } else {
      config.source = synth::read_spec(resolve(j.at("synth").get<std::string>()));
    }
    config.out_dir = overrides.out_dir.value_or(resolve(j.value("out", std::string("results"))));
    config.jobs = overrides.jobs.value_or(j.value("jobs", std::size_t{1}));
    config.seed = overrides.seed.value_or(j.value("seed", std::uint64_t{0}));

    eval::ExperimentSpec base;
    base.seed = config.seed;
    base.num_kernels = j.value("num_kernels", base.num_kernels);
    base.n_trees = j.value("n_trees", base.n_trees);
    const std::size_t early = j.value("early_timesteps", std::size_t{0});
    const std::size_t alphabet = j.value("alphabet_size", std::size_t{16});

    const json experiments = j.value("experiments", json("default"));
    if (experiments.is_string()) {
      if (experiments.get<std::string>() != "default") {
        throw Error(ErrorKind::ConfigParse, "unknown experiment set '" +
                                                experiments.get<std::string>() + "'");
      }
      config.experiments = eval::default_sweep(config.seed, base.num_kernels,
                                               base.n_trees, early, alphabet);
    } else {
      base.summarization.target_timesteps = early;
      base.summarization.alphabet_size = alphabet;
      config.experiments = parse_experiments(experiments, base);
    }
    if (config.experiments.empty()) {
      throw Error(ErrorKind::ConfigParse, path.string() + ": no experiments");
    }
    if (overrides.seed) {
      for (auto& e : config.experiments) e.seed = *overrides.seed;
    }
    return config;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ConfigParse, path.string() + ": " + e.what());
  }
}

std::string predictions_file_name(const EvalReport& report) {
  return "predictions-" + report.key + "-seed" + std::to_string(report.seed) + ".csv";
}

void cmd_synth(const fs::path& spec_file, const fs::path& out_dir,
               std::optional<std::uint64_t> seed, std::size_t jobs,
               std::ostream& log) {
  auto spec = synth::read_spec(spec_file);
  if (seed) spec.seed = *seed;
  const auto generated = synth::generate(spec, jobs);
  synth::export_tables(generated.dataset, out_dir);
  classify::save_json(synth::to_json(spec), out_dir / "synth-spec.json");
  json truth = json::object();
  for (const auto& [name, channels] : generated.truth.informative_channels) {
    truth[name] = channels;
  }
  classify::save_json(truth, out_dir / "ground-truth.json");
  log << "wrote " << generated.dataset.size() << " dyads to " << out_dir.string()
      << '\n';
}

std::vector<EvalReport> cmd_run(const RunConfig& config, std::ostream& log) {
  ensure_directory(config.out_dir);
  const LabeledDataset dataset = std::visit(
      [&](const auto& source) -> LabeledDataset {
        using T = std::decay_t<decltype(source)>;
        if constexpr (std::is_same_v<T, fs::path>) {
          return ingest::load_dataset(ingest::read_manifest(source), config.jobs);
        } else {
          return synth::generate(source, config.jobs).dataset;
        }
      },
      config.source);

  const std::size_t n = config.experiments.size();
  // Spread threads over experiments first, then over folds.
  const std::size_t outer = std::min(config.jobs, n);
  const std::size_t inner = std::max<std::size_t>(1, config.jobs / std::max<std::size_t>(1, outer));
  std::vector<EvalReport> reports(n);
  parallel_for(n, outer, [&](std::size_t k) {
    reports[k] = eval::run_experiment(dataset, config.experiments[k], inner);
  });

  for (const auto& r : reports) {
    write_text(config.out_dir / predictions_file_name(r), eval::format_predictions(r));
  }
  write_text(config.out_dir / "report.csv", eval::format_csv(reports));
  write_text(config.out_dir / "report.txt", eval::format_table(reports));
  log << eval::format_table(reports);
  return reports;
}

std::vector<EvalReport> cmd_report(const fs::path& results_dir, const fs::path& out_dir,
                                   std::ostream& log) {
  if (!fs::is_directory(results_dir)) {
    throw Error(ErrorKind::MissingInput, "'" + results_dir.string() + "' is not a directory");
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(results_dir)) {
    if (entry.is_regular_file() && entry.path().filename() == "report.csv") {
      files.push_back(entry.path());
    }
  }
  if (files.empty()) {
    throw Error(ErrorKind::MissingInput, "no report.csv below '" + results_dir.string() + "'");
  }
  std::sort(files.begin(), files.end());
  std::vector<EvalReport> merged;
  for (const auto& file : files) {
    try {
      auto reports = eval::parse_csv(read_text(file));
      merged.insert(merged.end(), reports.begin(), reports.end());
    } catch (const Error& e) {
      throw Error(e.kind(), file.string() + ": " + e.detail(), e.location());
    }
  }
  ensure_directory(out_dir);
  write_text(out_dir / "summary.csv", eval::format_csv(merged));
  write_text(out_dir / "summary.txt", eval::format_table(merged));
  log << eval::format_table(merged);
  return merged;
}

int main(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Deception classification from dyadic facial and vocal time series"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  std::size_t jobs = 1;
  std::uint64_t seed = 0;

  auto* synth_cmd = app.add_subcommand("synth", "Generate and export a synthetic corpus");
  synth_cmd->add_option("--config", config_path, "Synthetic corpus spec (JSON)")->required();
  synth_cmd->add_option("--out", out_path, "Output directory")->required();
  synth_cmd->add_option("--seed", seed, "Override the spec's seed");
  synth_cmd->add_option("--jobs", jobs, "Worker threads");

  auto* run_cmd = app.add_subcommand("run", "Run experiments and write reports");
  run_cmd->add_option("--config", config_path, "Run configuration (JSON)")->required();
  run_cmd->add_option("--out", out_path, "Output directory (overrides the config)");
  run_cmd->add_option("--jobs", jobs, "Worker threads (overrides the config)");
  run_cmd->add_option("--seed", seed, "Seed for every experiment (overrides the config)");

  std::string results_dir;
  auto* report_cmd = app.add_subcommand("report", "Merge prior runs into one summary table");
  report_cmd->add_option("results", results_dir, "Directory searched for report.csv files")
      ->required();
  report_cmd->add_option("--out", out_path, "Output directory (defaults to the results directory)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "dyadfuse: " << e.what() << "\n\n" << app.help();
    return e.get_exit_code() == 0 ? 2 : e.get_exit_code();
  }

  try {
    if (synth_cmd->parsed()) {
      std::optional<std::uint64_t> seed_override;
      if (synth_cmd->count("--seed")) seed_override = seed;
      cmd_synth(config_path, out_path, seed_override, jobs, out);
    } else if (run_cmd->parsed()) {
      Overrides overrides;
      if (run_cmd->count("--out")) overrides.out_dir = out_path;
      if (run_cmd->count("--jobs")) overrides.jobs = jobs;
      if (run_cmd->count("--seed")) overrides.seed = seed;
      cmd_run(read_run_config(config_path, overrides), out);
    } else if (report_cmd->parsed()) {
      cmd_report(results_dir, out_path.empty() ? fs::path(results_dir) : fs::path(out_path),
                 out);
    }
  } catch (const Error& e) {
    std::string message = e.what();
    std::replace(message.begin(), message.end(), '\n', ' ');
    err << "dyadfuse: " << message;
    if (e.location()) err << " (at " << *e.location() << ")";
    err << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "dyadfuse: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

int main(int argc, char** argv) { return main(argc, argv, std::cout, std::cerr); }

}  // namespace dyadfuse::cli
