#pragma once

#include <filesystem>
#include <iosfwd>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "selbench/corpus/split.hpp"
#include "selbench/pipeline/experiment_config.hpp"
#include "selbench/pipeline/reports.hpp"
#include "selbench/strategy/evaluate.hpp"

namespace selbench::pipeline {

struct RunOptions {
  /// Concurrent (dataset, algorithm, repetition) jobs.
  unsigned jobs = 1;
  /// Ignore cached stage outputs.
  bool force = false;
  /// Progress lines; nullptr for silence.
  std::ostream* log = nullptr;
};

struct JobId {
  std::size_t dataset = 0;
  std::size_t algorithm = 0;
  int repetition = 0;
};

struct JobStatus {
  JobId id;
  bool ok = true;
  std::string stage;  // where it failed
  std::string error;
  bool tune_cached = false;
  bool eval_cached = false;
};

/// Stage runner. Each stage runs the stages it depends on first; outputs go
/// under the config's output directory:
///   prep/<dataset>/{interactions.csv, manifest.json}
///   split/<dataset>/rep<r>/assignment.csv
///   tune/<dataset>/<algorithm>/rep<r>/{trials.csv, best.json}
///   eval/<dataset>/<algorithm>/rep<r>/{scores.csv, eval.json}
///   stats.json, report/, manifest.json
/// Every stage directory carries a content key and is reused when it matches.
/// Results do not depend on `jobs`.
class Pipeline {
 public:
  Pipeline(ExperimentConfig config, RunOptions options);

  void prep();
  void split();
  void tune();
  void eval();
  void stats();
  void report();
  /// All stages, then the manifest.
  void run_all();

  nlohmann::json manifest() const;
  void write_manifest();

  /// False once a dataset or job has failed.
  bool ok() const noexcept;
  const std::vector<JobStatus>& jobs() const noexcept { return statuses_; }
  const ExperimentConfig& config() const noexcept { return config_; }
  std::filesystem::path out() const { return config_.output_dir; }

  /// Tables from eval/ on disk, for every job that has one.
  ReportInputs load_report_inputs() const;
  /// Tables from this process's eval stage (running it if needed).
  const ReportInputs& report_inputs();

  std::filesystem::path prep_dir(std::size_t d) const;
  std::filesystem::path split_dir(std::size_t d, int rep) const;
  std::filesystem::path tune_dir(const JobId& job) const;
  std::filesystem::path eval_dir(const JobId& job) const;

 private:
  struct Prepared {
    corpus::InteractionMatrix matrix;
    std::string key;
  };

  void ensure_prepared();
  void ensure_split();
  void run_jobs(bool do_eval);
  void tune_job(const JobId& job, JobStatus& status, unsigned threads);
  strategy::StrategyScoreTable eval_job(const JobId& job, JobStatus& status, unsigned threads);
  std::size_t effective_budget(const AlgorithmSpec& algo) const;
  std::string tune_key(const JobId& job) const;
  std::string eval_key(const JobId& job) const;
  std::vector<JobId> all_jobs() const;
  ReportInputs report_skeleton() const;
  void note(const std::string& line);
  void stage_started(const std::string& name);
  void stage_finished(const std::string& name);
  void cache_hit(const std::string& what);

  ExperimentConfig config_;
  RunOptions options_;
  std::vector<std::optional<Prepared>> prepared_;
  std::vector<std::string> dataset_errors_;
  std::vector<std::vector<std::optional<corpus::FoldSplit>>> splits_;
  std::vector<std::vector<std::string>> split_keys_;
  bool prep_done_ = false;
  bool split_done_ = false;
  bool tune_done_ = false;
  bool eval_done_ = false;
  std::vector<JobStatus> statuses_;
  std::size_t failures_ = 0;
  std::optional<ReportInputs> live_;
  nlohmann::json runtime_;
  std::mutex log_mutex_;
};

/// Manifest without the "runtime" section, which holds wall-clock times,
/// worker counts and cache hits.
nlohmann::json deterministic_manifest(const nlohmann::json& manifest);

std::string iso_timestamp();

}  // namespace selbench::pipeline
