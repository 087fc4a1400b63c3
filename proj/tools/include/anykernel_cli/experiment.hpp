#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <anykernel/eval.hpp>

#include "anykernel_cli/config.hpp"

namespace anykernel::cli {

struct Artifacts {
  std::filesystem::path transcript;
  std::filesystem::path metrics;
  std::filesystem::path plot;
  std::vector<std::filesystem::path> extra;
  std::vector<OiReport> reports;
  bool violation = false;
};

// Simulates, then writes <name>.transcript.jsonl, <name>.metrics.csv, <name>.svg (and mode extras).
Artifacts run_experiment(const ExperimentConfig& config, const std::filesystem::path& out_dir);

// Recomputes the run's metrics from a stored transcript. Writes <stem>.metrics.csv into out_dir.
// A kernel hash mismatch is reported on warn and evaluation proceeds.
Artifacts evaluate_transcript(const std::filesystem::path& transcript, const std::filesystem::path& out_dir,
                              std::ostream& warn);

// SVG of the first probe's cumulative OI error with its bound.
void plot_transcript(const std::filesystem::path& transcript, const std::filesystem::path& svg);

// Runs seeds seed, seed + 1, ... into out_dir/rep-<k>/ on worker threads and merges their metrics
// into out_dir/<name>.replications.csv in replication order. Returns true if any run violated a bound.
bool run_replications(const ExperimentConfig& config, const std::filesystem::path& out_dir, int replications);

// Batch learner over a sample CSV; writes <name>.alpha.csv and returns the objective value.
double batch_learn(const std::string& sample_csv, const std::string& kernel, double radius,
                   const std::filesystem::path& alpha_csv);

}  // namespace anykernel::cli
