#include <cstdlib>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include <anykernel/errors.hpp>

#include "anykernel_cli/config.hpp"
#include "anykernel_cli/experiment.hpp"

namespace {

using namespace anykernel::cli;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitViolation = 2;

std::filesystem::path resolve_out_dir(const std::string& flag, const std::string& from_config) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("ANYKERNEL_OUT_DIR"); env != nullptr && *env != '\0') return env;
  return from_config;
}

void print_reports(const Artifacts& a) {
  for (const auto& r : a.reports)
    std::cout << (r.pass ? "ok    " : "FAIL  ") << r.name << "  error=" << anykernel::format_number(r.error)
              << "  bound=" << anykernel::format_number(r.bound) << '\n';
}

void print_files(const Artifacts& a) {
  if (!a.transcript.empty()) std::cout << "transcript: " << a.transcript.string() << '\n';
  if (!a.metrics.empty()) std::cout << "metrics:    " << a.metrics.string() << '\n';
  if (!a.plot.empty()) std::cout << "plot:       " << a.plot.string() << '\n';
  for (const auto& p : a.extra) std::cout << "extra:      " << p.string() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kernel-based online forecasting experiments"};
  app.require_subcommand(1);

  std::string config_path;
  std::string preset;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  int replications = 1;
  auto* run = app.add_subcommand("run", "Simulate an experiment and write its artifacts");
  auto* cfg_opt = run->add_option("--config", config_path, "YAML experiment file")->check(CLI::ExistingFile);
  run->add_option("--preset", preset, "Named preset")->excludes(cfg_opt);
  run->add_option("--seed", seed, "Override the config seed");
  run->add_option("--out-dir", out_dir, "Output directory (overrides ANYKERNEL_OUT_DIR and the config)");
  run->add_option("--replications", replications, "Independent runs with seeds seed, seed+1, ...")
      ->check(CLI::PositiveNumber);
  run->add_flag_callback("--list-presets", [] {
    for (const auto& n : preset_names()) std::cout << n << '\n';
    std::exit(kExitOk);
  }, "Print preset names and exit");

  std::string transcript;
  std::string eval_out;
  auto* eval = app.add_subcommand("eval", "Recompute metrics from a stored transcript");
  eval->add_option("transcript", transcript, "Transcript file")->required()->check(CLI::ExistingFile);
  eval->add_option("--out-dir", eval_out, "Output directory (default: next to the transcript)");

  std::string plot_in;
  std::string svg_out;
  auto* plot = app.add_subcommand("plot", "Render the cumulative OI error of a transcript as SVG");
  plot->add_option("transcript", plot_in, "Transcript file")->required()->check(CLI::ExistingFile);
  plot->add_option("-o,--output", svg_out, "SVG path (default: transcript stem + .svg)");

  std::string sample;
  std::string kernel = "(gaussian 1)";
  double radius = 1.0;
  std::string alpha_out;
  auto* batch = app.add_subcommand("batch-learn", "Fit the RKHS-ball learner to a labeled sample");
  batch->add_option("sample", sample, "CSV with header y,x1,...")->required()->check(CLI::ExistingFile);
  batch->add_option("--kernel", kernel, "Kernel expression");
  batch->add_option("--radius", radius, "RKHS norm bound")->check(CLI::PositiveNumber);
  batch->add_option("-o,--output", alpha_out, "Coefficient CSV path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // --help and --version arrive here too, with exit code 0
    return app.exit(e) == 0 ? kExitOk : kExitError;
  }

  try {
    if (*run) {
      if (config_path.empty() && preset.empty()) throw anykernel::ConfigError("run needs --config or --preset");
      ExperimentConfig cfg = preset.empty() ? load_config(config_path) : preset_config(preset);
      if (seed) cfg.seed = *seed;
      const auto dir = resolve_out_dir(out_dir, cfg.out_dir);
      if (replications > 1) {
        const bool violated = run_replications(cfg, dir, replications);
        std::cout << "replications: " << replications << " merged into "
                  << (dir / (cfg.name + ".replications.csv")).string() << '\n';
        return violated ? kExitViolation : kExitOk;
      }
      const auto a = run_experiment(cfg, dir);
      print_reports(a);
      print_files(a);
      return a.violation ? kExitViolation : kExitOk;
    }
    if (*eval) {
      const std::filesystem::path p(transcript);
      const auto dir = eval_out.empty() ? (p.has_parent_path() ? p.parent_path() : ".") : std::filesystem::path(eval_out);
      const auto a = evaluate_transcript(p, dir, std::cerr);
      print_reports(a);
      std::cout << "metrics:    " << a.metrics.string() << '\n';
      return a.violation ? kExitViolation : kExitOk;
    }
    if (*plot) {
      std::filesystem::path out = svg_out;
      if (out.empty()) {
        std::string s = plot_in;
        const std::string suffix = ".transcript.jsonl";
        if (s.size() > suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0)
          s.resize(s.size() - suffix.size());
        out = s + ".svg";
      }
      plot_transcript(plot_in, out);
      std::cout << "plot:       " << out.string() << '\n';
      return kExitOk;
    }
    if (*batch) {
      const double v = batch_learn(sample, kernel, radius, alpha_out);
      std::cout << "objective: " << anykernel::format_number(v) << '\n' << "alpha:     " << alpha_out << '\n';
      return kExitOk;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitOk;
}
