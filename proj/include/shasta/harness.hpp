#pragma once

// Experiment driver: builds the sample source for each seed, runs every
// configured estimator from a shared random initialization, and records
// metric traces plus an across-seed summary.

#include "shasta/config.hpp"
#include "shasta/metrics.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace shasta {

struct EstimatorRun {
  std::string label;
  std::string type;
  std::uint64_t seed = 0;
  MetricTrace trace;
  /// Wall-clock seconds spent inside the estimator (metrics excluded).
  double seconds = 0.0;
  /// Batch solver iterations actually run (0 for other estimators).
  int iterations = 0;
};

struct ExperimentResult {
  std::string name;
  std::vector<EstimatorRun> runs;
  /// Summary document (per-seed finals and across-seed statistics) as JSON text.
  std::string summary_json;

  /// Runs for one estimator label, in seed order.
  std::vector<const EstimatorRun*> runs_for(const std::string& label) const;
};

struct RunOptions {
  /// Write trace CSVs, summary.json and state checkpoints under output_dir.
  bool write_files = true;
};

/// Shared starting point for seed `seed`: F0 entries N(0, 1/d), v0 entries U(0, 1).
struct Initialization {
  FactorMatrix f0;
  NoiseVariances v0;
};
Initialization draw_initialization(std::uint64_t seed, Index d, Index k, int groups);

ExperimentResult run_experiment(const ExperimentConfig& cfg, const RunOptions& opts = {});

struct TimingRow {
  std::uint64_t seed = 0;
  double initial_gap = 0.0;
  double batch_final_gap = 0.0;
  double batch_seconds = 0.0;
  int batch_iterations = 0;
  std::optional<double> stream_final_gap;
  std::optional<double> stream_seconds;
  /// Estimator seconds at the first checkpoint whose gap is within 5% of the
  /// batch solver's total improvement, if reached.
  std::optional<double> stream_seconds_to_target;
};

struct TimingResult {
  ExperimentResult experiment;
  std::string stream_label;
  std::string batch_label;
  std::vector<TimingRow> rows;

  std::string table() const;
  std::string to_json() const;
};

/// Runs a config that names one batch estimator and at most one streaming
/// estimator and compares their log-likelihood gap against wall-clock time.
/// Log-likelihood tracking is switched on regardless of the config.
TimingResult timing_run(const ExperimentConfig& cfg, const RunOptions& opts = {});

}  // namespace shasta
