#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "selbench/common.hpp"
#include "selbench/pipeline/pipeline.hpp"

namespace {

enum ExitCode { kOk = 0, kJobsFailed = 1, kUsage = 2 };

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Selection-strategy benchmark for top-n recommenders"};
  app.set_version_flag("--version", std::string(selbench::version()));
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::optional<std::uint64_t> seed;
  unsigned jobs = 1;
  std::optional<std::string> out_dir;
  bool force = false;
  bool quiet = false;
  app.add_option("--config", config_path, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "Override the config's root seed");
  app.add_option("--jobs", jobs, "Concurrent (dataset, algorithm, repetition) jobs")
      ->check(CLI::Range(1u, 1024u));
  app.add_option("--out", out_dir, "Override the config's output directory");
  app.add_flag("--force", force, "Recompute stages even when cached outputs match");
  app.add_flag("-q,--quiet", quiet, "No progress output");

  auto* prep = app.add_subcommand("prep", "Load, binarize and k-core filter datasets");
  auto* split = app.add_subcommand("split", "Per-user train/validation/test splits");
  auto* tune = app.add_subcommand("tune", "Random hyperparameter search per job");
  auto* eval = app.add_subcommand("eval", "Score every selection strategy per job");
  auto* stats = app.add_subcommand("stats", "Friedman/Nemenyi tests and correlations");
  auto* report = app.add_subcommand("report", "Report tables from the score tables");
  auto* run_all = app.add_subcommand("run-all", "Every stage, then the run manifest");

  CLI11_PARSE(app, argc, argv);

  try {
    auto config = selbench::pipeline::load_experiment_config(config_path);
    if (seed) config.seed = *seed;
    if (out_dir) config.output_dir = *out_dir;

    selbench::pipeline::RunOptions options;
    options.jobs = jobs;
    options.force = force;
    options.log = quiet ? nullptr : &std::cerr;
    selbench::pipeline::Pipeline pipeline(std::move(config), options);

    if (*prep) pipeline.prep();
    if (*split) pipeline.split();
    if (*tune) pipeline.tune();
    if (*eval) pipeline.eval();
    if (*stats) pipeline.stats();
    if (*report) {
      pipeline.stats();
      pipeline.report();
    }
    if (*run_all) {
      pipeline.run_all();
    } else {
      pipeline.write_manifest();
    }

    if (!pipeline.ok()) {
      std::cerr << "selbench: some jobs failed; see " << (pipeline.out() / "manifest.json").string()
                << '\n';
      return kJobsFailed;
    }
    return kOk;
  } catch (const selbench::ConfigError& e) {
    std::cerr << "selbench: configuration error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "selbench: " << e.what() << '\n';
    return kJobsFailed;
  }
}
