#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <anykernel/nature.hpp>
#include <anykernel/omni.hpp>

namespace anykernel::cli {

struct NatureConfig {
  std::string kind = "contrarian";
  double theta = 0.5;
  int bits = 0;
  double a = 0.0;
  double b = 0.0;
  std::vector<double> weights;
  double bias = 0.0;
  double sigma = 0.15;
  BetaComponent first{2.0, 5.0};
  BetaComponent second{5.0, 2.0};
  double noise = 0.1;
  GraphEvolutionParams graph;
};

struct ExperimentConfig {
  std::string mode = "binary";  // binary | quantile | vector | linkpred | omni | batch
  std::string kernel = "calibration";
  NatureConfig nature;
  std::int64_t T = 1000;
  std::uint64_t seed = 0;
  int probes = 5;

  // quantile
  double q = 0.5;
  double y_min = 0.0;
  double y_max = 1.0;
  // vector
  std::vector<double> lower{0.0, 0.0};
  std::vector<double> upper{1.0, 1.0};
  int max_iter = 500;
  double gamma = 0.0;  // > 0: Gaussian factor on p; otherwise k(x, x') I
  // linkpred
  int bins = 10;
  // omni
  std::vector<std::string> losses{"squared", "absolute", "logistic-truncated"};
  std::string comparators = "builtin";  // or a CSV path
  std::optional<TreeClass> trees;
  // batch
  std::string sample;
  double radius = 1.0;

  std::string out_dir = "out";
  std::string name = "run";

  void validate() const;
};

// Rejects unknown keys and ill-typed values with "line L, column C" diagnostics.
ExperimentConfig parse_config(const std::string& yaml_text);
ExperimentConfig load_config(const std::string& path);

// Named presets: calibration-adversary, quantile-gaussian, vector-gaussian, linkpred-groups,
// omni-logistic.
ExperimentConfig preset_config(const std::string& name);
std::vector<std::string> preset_names();

// Canonical JSON text (stored in transcript headers) and its inverse.
std::string config_to_json(const ExperimentConfig& c);
ExperimentConfig config_from_json(const std::string& text);

}  // namespace anykernel::cli
