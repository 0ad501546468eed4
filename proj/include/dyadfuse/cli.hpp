#pragma once

// Command-line front end: synth, run and report subcommands.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "dyadfuse/eval.hpp"
#include "dyadfuse/synth.hpp"

namespace dyadfuse::cli {

/// Run configuration (JSON):
///
///   {
///     "manifest": "corpus/manifest.json",     // or "synth": "spec.json"
///     "out": "results",
///     "jobs": 1,
///     "seed": 42,
///     "num_kernels": 10000, "n_trees": 100,
///     "early_timesteps": 0, "alphabet_size": 16,
///     "experiments": "default"                 // or a list, see below
///   }
///
/// Each experiment object holds "mode" (unimodal | early | late), and
/// optionally "modality", "facial_scope", "audio_scope" (sender | both),
/// "classifier" (rocket | interval-forest), "summarization"
/// ({"method": "paa" | "sax", "target_timesteps", "alphabet_size",
/// "binning": "equal_width" | "gaussian"}), "num_kernels", "n_trees",
/// "meta_max_depth", "normalize" and "seeds" (a list; defaults to [seed]).
/// Relative paths resolve against the configuration file's directory.
struct RunConfig {
  std::variant<std::filesystem::path, synth::SynthSpec> source;
  std::filesystem::path out_dir = "results";
  std::size_t jobs = 1;
  std::uint64_t seed = 0;
  std::vector<eval::ExperimentSpec> experiments;
};

struct Overrides {
  std::optional<std::filesystem::path> out_dir;
  std::optional<std::size_t> jobs;
  std::optional<std::uint64_t> seed;
};

/// Throws ConfigParse or MissingInput.
RunConfig read_run_config(const std::filesystem::path& path,
                          const Overrides& overrides = {});

/// File name of an experiment's prediction table.
std::string predictions_file_name(const EvalReport& report);

/// Generates the corpus described by `spec_file` and exports it to `out_dir`.
void cmd_synth(const std::filesystem::path& spec_file,
               const std::filesystem::path& out_dir,
               std::optional<std::uint64_t> seed, std::size_t jobs,
               std::ostream& log);

/// Executes every experiment and writes report.txt, report.csv and one
/// predictions file per experiment. Reports follow the configured order.
std::vector<EvalReport> cmd_run(const RunConfig& config, std::ostream& log);

/// Merges every report.csv below `results_dir` (sorted by path) into
/// summary.txt and summary.csv in `out_dir`.
std::vector<EvalReport> cmd_report(const std::filesystem::path& results_dir,
                                   const std::filesystem::path& out_dir,
                                   std::ostream& log);

/// Entry point; returns the process exit code. Progress and tables go to
/// `out`, diagnostics and usage text to `err`.
int main(int argc, char** argv, std::ostream& out, std::ostream& err);
int main(int argc, char** argv);

}  // namespace dyadfuse::cli
