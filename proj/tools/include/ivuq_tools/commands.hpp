#pragma once

// Subcommands of the ivuq tool. Each takes a plain options struct so the
// commands can also be driven in-process (tests, acceptance runs).

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ivuq/config.hpp"
#include "ivuq/io.hpp"

namespace ivuq::cli {

namespace fs = std::filesystem;

struct CommonOptions {
  fs::path config;  // empty: fall back to the input directory's config.ini, then defaults
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> workers;
  fs::path out = ".";
};

/// --config (or `fallback_dir`/config.ini when present), then --seed/--workers.
ExperimentConfig resolve_config(const CommonOptions& common, const fs::path& fallback_dir = {});
Provenance provenance_of(const ExperimentConfig& cfg);
/// "ivuq config_hash=<hex> seed=<n>", the leading comment of every text output.
std::string provenance_line(const ExperimentConfig& cfg);

inline constexpr const char* kConfigFile = "config.ini";
inline constexpr const char* kDatasetFile = "train.ivuqds";
inline constexpr const char* kSplitFile = "split.txt";
inline constexpr const char* kPhantomDir = "phantoms";
inline constexpr const char* kPhantomManifest = "manifest.csv";
inline constexpr const char* kEnsembleManifest = "ensemble.txt";
inline constexpr const char* kPredictionManifest = "predictions.txt";

struct SimulateOptions {
  CommonOptions common;
  std::optional<std::size_t> n;         // overrides data.n_train
  std::optional<std::size_t> phantoms;  // overrides data.phantoms_per_snr
};
/// Writes config.ini, train.ivuqds, split.txt and phantoms/ (manifest + files).
void cmd_simulate(const SimulateOptions& opt, std::ostream& log);

struct TrainOptions {
  CommonOptions common;
  fs::path data;  // simulate output directory
  std::optional<std::string> head;
  std::optional<std::size_t> k;
  std::optional<std::size_t> members;
  std::optional<std::size_t> epochs;
  bool k_sweep = false;
  std::vector<std::size_t> sweep_ks{2, 3, 5, 10, 20};
};
/// Writes ensemble.txt, member_<m>.ivuqnn, loss_member_<m>.csv and config.ini;
/// in sweep mode one sub-directory per K plus ksweep.csv.
void cmd_train(const TrainOptions& opt, std::ostream& log);

struct PredictCommand {
  CommonOptions common;
  fs::path model;        // ensemble manifest; empty with `baseline`
  bool baseline = false;
  fs::path phantoms;     // simulate's phantoms/ directory
  fs::path volume;       // sidecar of a raw volume
  bool dump_samples = false;
  std::string name;      // model label in reports; defaults to the head kind or "lsq"
};
/// Writes <stem>.ivuqpr (and <stem>.ivuqsm with dump_samples) per input plus predictions.txt.
void cmd_predict(const PredictCommand& opt, std::ostream& log);

struct EvaluateCommand {
  CommonOptions common;
  std::vector<fs::path> predictions;  // predict output directories
  fs::path phantoms;                  // phantom mode
  fs::path volume;                    // ROI mode
  fs::path mask;                      // ROI mode: u8 mask overriding the sidecar's
};
/// Phantom mode: accuracy.csv, uq.csv, calibration.csv, uncertainty.csv.
/// ROI mode: roi.csv.
void cmd_evaluate(const EvaluateCommand& opt, std::ostream& log);

struct ReportCommand {
  CommonOptions common;
  fs::path evaluation;  // evaluate output directory; defaults to --out
};
/// Writes report.md (markdown tables) and echoes it to `log`.
void cmd_report(const ReportCommand& opt, std::ostream& log);

/// Full command line entry point; returns the process exit code.
int run(int argc, char** argv);

}  // namespace ivuq::cli
