#include "selbench/pipeline/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <ostream>

#include "selbench/common.hpp"
#include "selbench/corpus/io.hpp"
#include "selbench/corpus/preprocess.hpp"
#include "selbench/pipeline/cache.hpp"
#include "selbench/recsys/model.hpp"
#include "selbench/tuner/random_search.hpp"

namespace selbench::pipeline {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr const char* kManifestFormat = "selbench.manifest/1";

json decision_flags() {
  return {{"relevance", "binary"},
          {"selection_order", "original ranked order"},
          {"ideal_dcg_depth", "min(n, |relevant|)"},
          {"users_without_relevant_items", "excluded from averages"},
          {"validation_exclusions", "train"},
          {"test_exclusions", "train and validation"},
          {"split", "independent per-user shuffle per repetition"},
          {"split_sizes", "n_test = n_validation = max(1, round(0.2 m))"},
          {"tuning_objective", "validation nDCG@n of the top-n strategy"},
          {"failed_trial_score", "-inf"},
          {"untunable_algorithms", "single trial"},
          {"friedman_blocks", "dataset x repetition"},
          {"friedman_ties", "average ranks with tie correction"},
          {"nemenyi_q", "studentized range quantile (df = inf) / sqrt(2)"}};
}

std::string fixed_name(std::string_view s) {
  // directory names come from config names; keep them filesystem-safe
  std::string out;
  for (char c : s) {
    const bool keep = std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
    out += keep ? c : '_';
  }
  return out;
}

}  // namespace

std::string iso_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json deterministic_manifest(const json& manifest) {
  json out = manifest;
  out.erase("runtime");
  return out;
}

Pipeline::Pipeline(ExperimentConfig config, RunOptions options)
    : config_(std::move(config)), options_(options) {
  config_.validate();
  if (options_.jobs < 1) options_.jobs = 1;
  prepared_.resize(config_.datasets.size());
  dataset_errors_.resize(config_.datasets.size());
  splits_.assign(config_.datasets.size(),
                 std::vector<std::optional<corpus::FoldSplit>>(config_.repetitions));
  split_keys_.assign(config_.datasets.size(), std::vector<std::string>(config_.repetitions));
  runtime_ = {{"stages", json::object()}, {"cache_hits", json::array()}};
}

fs::path Pipeline::prep_dir(std::size_t d) const {
  return out() / "prep" / fixed_name(config_.datasets.at(d).name);
}

fs::path Pipeline::split_dir(std::size_t d, int rep) const {
  return out() / "split" / fixed_name(config_.datasets.at(d).name) / ("rep" + std::to_string(rep));
}

fs::path Pipeline::tune_dir(const JobId& job) const {
  return out() / "tune" / fixed_name(config_.datasets.at(job.dataset).name) /
         fixed_name(config_.algorithms.at(job.algorithm).name) / ("rep" + std::to_string(job.repetition));
}

fs::path Pipeline::eval_dir(const JobId& job) const {
  return out() / "eval" / fixed_name(config_.datasets.at(job.dataset).name) /
         fixed_name(config_.algorithms.at(job.algorithm).name) / ("rep" + std::to_string(job.repetition));
}

void Pipeline::note(const std::string& line) {
  if (!options_.log) return;
  std::lock_guard lock(log_mutex_);
  *options_.log << line << '\n';
  options_.log->flush();
}

void Pipeline::stage_started(const std::string& name) {
  std::lock_guard lock(log_mutex_);
  runtime_["stages"][name]["started"] = iso_timestamp();
}

void Pipeline::stage_finished(const std::string& name) {
  std::lock_guard lock(log_mutex_);
  runtime_["stages"][name]["finished"] = iso_timestamp();
}

void Pipeline::cache_hit(const std::string& what) {
  std::lock_guard lock(log_mutex_);
  runtime_["cache_hits"].push_back(what);
}

void Pipeline::ensure_prepared() {
  if (prep_done_) return;
  stage_started("prep");
  for (std::size_t d = 0; d < config_.datasets.size(); ++d) {
    const auto& spec = config_.datasets[d];
    try {
      const auto source = config_.dataset_path(spec);
      const auto source_hash = sha256_file(source);
      const auto key = stage_key("prep", {{"dataset", dataset_to_json(spec)}, {"source_sha256", source_hash}});
      StageCache cache(prep_dir(d));
      if (!options_.force && cache.fresh(key, {"interactions.csv", "manifest.json"})) {
        cache_hit("prep/" + spec.name);
        note("prep " + spec.name + ": cached");
      } else {
        cache.invalidate();
        note("prep " + spec.name + ": loading " + source.string());
        const auto loaded = corpus::load_interactions(source, spec.schema);
        const auto feedback = corpus::prepare_feedback(loaded.records, spec.feedback, spec.binarize);
        const auto core = corpus::k_core(feedback, spec.k_core);
        json manifest = {{"dataset", spec.name},
                         {"domain", spec.domain},
                         {"feedback", std::string(corpus::to_string(spec.feedback))},
                         {"source_sha256", source_hash},
                         {"rows_read", loaded.rows_read},
                         {"duplicates_merged", loaded.duplicates_merged},
                         {"after_deduplication", loaded.records.size()},
                         {"after_feedback_filter", feedback.size()},
                         {"k_core", spec.k_core},
                         {"k_core_removed_users", core.removed_users},
                         {"k_core_removed_items", core.removed_items},
                         {"k_core_empty", core.empty}};
        if (core.empty) {
          write_text_file(cache.dir() / "manifest.json", manifest.dump(2) + "\n");
          throw InputError("k-core filtering left no interactions");
        }
        const auto matrix = corpus::InteractionMatrix::from_records(core.records);
        manifest["stats"] = corpus::stats_to_json(corpus::compute_stats(matrix));
        corpus::write_canonical_csv(cache.dir() / "interactions.csv", matrix);
        write_text_file(cache.dir() / "manifest.json", manifest.dump(2) + "\n");
        cache.commit(key);
      }
      // Always continue from the canonical dump so cached and fresh runs
      // index users and items identically.
      auto matrix = corpus::read_canonical_csv(cache.dir() / "interactions.csv");
      note("prep " + spec.name + ": " + std::to_string(matrix.n_users()) + " users, " +
           std::to_string(matrix.n_items()) + " items, " + std::to_string(matrix.nnz()) +
           " interactions");
      prepared_[d] = Prepared{std::move(matrix), key};
    } catch (const std::exception& e) {
      dataset_errors_[d] = std::string("prep: ") + e.what();
      note("prep " + spec.name + ": FAILED: " + e.what());
    }
  }
  prep_done_ = true;
  stage_finished("prep");
}

void Pipeline::ensure_split() {
  ensure_prepared();
  if (split_done_) return;
  stage_started("split");
  for (std::size_t d = 0; d < config_.datasets.size(); ++d) {
    if (!prepared_[d]) continue;
    const auto& spec = config_.datasets[d];
    try {
      for (int rep = 0; rep < config_.repetitions; ++rep) {
        const auto key = stage_key(
            "split", {{"prep", prepared_[d]->key},
                      {"seed", config_.seed},
                      {"repetition", rep},
                      {"ratios", {config_.ratios.train, config_.ratios.validation, config_.ratios.test}}});
        StageCache cache(split_dir(d, rep));
        const auto file = cache.dir() / "assignment.csv";
        if (!options_.force && cache.fresh(key, {"assignment.csv"})) {
          cache_hit("split/" + spec.name + "/rep" + std::to_string(rep));
        } else {
          cache.invalidate();
          const auto fold = corpus::split_per_user(prepared_[d]->matrix, config_.ratios, config_.seed, rep);
          corpus::write_split_csv(file, fold);
          cache.commit(key);
        }
        splits_[d][rep] = corpus::read_split_csv(file, prepared_[d]->matrix, config_.seed, rep);
        split_keys_[d][rep] = key;
      }
      note("split " + spec.name + ": " + std::to_string(config_.repetitions) + " repetition(s)");
    } catch (const std::exception& e) {
      dataset_errors_[d] = std::string("split: ") + e.what();
      note("split " + spec.name + ": FAILED: " + e.what());
    }
  }
  split_done_ = true;
  stage_finished("split");
}

std::vector<JobId> Pipeline::all_jobs() const {
  std::vector<JobId> jobs;
  for (std::size_t d = 0; d < config_.datasets.size(); ++d) {
    for (std::size_t a = 0; a < config_.algorithms.size(); ++a) {
      for (int rep = 0; rep < config_.repetitions; ++rep) jobs.push_back({d, a, rep});
    }
  }
  return jobs;
}

std::size_t Pipeline::effective_budget(const AlgorithmSpec& algo) const {
  return algo.space.tunable() ? config_.trial_budget : 1;
}

std::string Pipeline::tune_key(const JobId& job) const {
  json inputs = {{"split", split_keys_[job.dataset][job.repetition]},
                 {"algorithm", algorithm_to_json(config_.algorithms[job.algorithm])},
                 {"budget", effective_budget(config_.algorithms[job.algorithm])},
                 {"K", config_.K},
                 {"n", config_.n},
                 {"seed", config_.seed}};
  inputs["time_limit_seconds"] =
      config_.time_limit_seconds ? json(*config_.time_limit_seconds) : json(nullptr);
  return stage_key("tune", inputs);
}

void Pipeline::tune_job(const JobId& job, JobStatus& status, unsigned threads) {
  const auto& spec = config_.datasets[job.dataset];
  const auto& algo = config_.algorithms[job.algorithm];
  const auto& fold = *splits_[job.dataset][job.repetition];
  const auto label = spec.name + "/" + algo.name + "/rep" + std::to_string(job.repetition);
  const auto key = tune_key(job);
  StageCache cache(tune_dir(job));
  if (!options_.force && cache.fresh(key, {"trials.csv", "best.json"})) {
    status.tune_cached = true;
    cache_hit("tune/" + label);
    return;
  }
  cache.invalidate();

  const auto top_n = strategy::enumerate_strategies(config_.K, config_.n);
  const std::vector<strategy::SelectionStrategy> top_only{top_n.front()};
  const std::vector<const corpus::InteractionMatrix*> exclude{&fold.train};
  tuner::Objective objective = [&](const recsys::RecommenderConfig& cfg) {
    const auto model = recsys::fit(fold.train, cfg, {threads});
    const auto ctx = strategy::build_eval_context(model, fold.validation, exclude, config_.K,
                                                  config_.n, threads);
    return strategy::score_strategies(ctx, top_only, threads).ndcg.front();
  };

  tuner::SearchOptions search;
  search.budget = effective_budget(algo);
  search.seed = derive_seed(config_.seed, "tune",
                            {purpose_key(spec.name), purpose_key(algo.name),
                             static_cast<std::uint64_t>(job.repetition)});
  search.time_limit_seconds = config_.time_limit_seconds;
  const auto result = tuner::random_search(algo.space, search, objective);
  const auto& best = result.log.trials[result.log.best];
  std::size_t failed = 0;
  for (const auto& t : result.log.trials) failed += t.failed ? 1 : 0;

  write_text_file(cache.dir() / "trials.csv", tuner::trial_log_csv(result.log));
  if (best.failed) {
    throw Error("every trial failed; first error: " + result.log.trials.front().error);
  }
  const json summary = {{"config", recsys::config_to_json(best.config)},
                        {"val_ndcg", best.score},
                        {"trial", best.index},
                        {"trials", result.log.trials.size()},
                        {"failed_trials", failed},
                        {"search_seed", search.seed}};
  write_text_file(cache.dir() / "best.json", summary.dump(2) + "\n");
  cache.commit(key);
  note("tune " + label + ": best val nDCG@" + std::to_string(config_.n) + " " +
       format_double(best.score) + " (trial " + std::to_string(best.index) + " of " +
       std::to_string(result.log.trials.size()) + ")");
}

std::string Pipeline::eval_key(const JobId& job) const {
  return stage_key("eval", {{"tune", tune_key(job)},
                            {"best_sha256", sha256_file(tune_dir(job) / "best.json")},
                            {"K", config_.K},
                            {"n", config_.n}});
}

strategy::StrategyScoreTable Pipeline::eval_job(const JobId& job, JobStatus& status,
                                                unsigned threads) {
  const auto& spec = config_.datasets[job.dataset];
  const auto& algo = config_.algorithms[job.algorithm];
  const auto& fold = *splits_[job.dataset][job.repetition];
  const auto label = spec.name + "/" + algo.name + "/rep" + std::to_string(job.repetition);
  const auto key = eval_key(job);
  StageCache cache(eval_dir(job));
  const auto scores_file = cache.dir() / "scores.csv";
  if (!options_.force && cache.fresh(key, {"scores.csv"})) {
    status.eval_cached = true;
    cache_hit("eval/" + label);
    return strategy::read_score_table(scores_file);
  }
  cache.invalidate();

  const auto best = json::parse(read_text_file(tune_dir(job) / "best.json"));
  const auto cfg = recsys::config_from_json(best.at("config"));
  const auto model = recsys::fit(fold.train, cfg, {threads});
  const std::vector<const corpus::InteractionMatrix*> val_exclude{&fold.train};
  const std::vector<const corpus::InteractionMatrix*> test_exclude{&fold.train, &fold.validation};
  const auto val_ctx = strategy::build_eval_context(model, fold.validation, val_exclude,
                                                    config_.K, config_.n, threads);
  const auto test_ctx = strategy::build_eval_context(model, fold.test, test_exclude, config_.K,
                                                     config_.n, threads);
  const auto strategies = strategy::enumerate_strategies(config_.K, config_.n);
  auto table = strategy::evaluate_strategies(val_ctx, test_ctx, strategies,
                                             {spec.name, algo.name, job.repetition}, threads);
  strategy::write_score_table(scores_file, table);
  const json info = {{"validation_users", table.validation_users},
                     {"test_users", table.test_users},
                     {"matches_tuning_score",
                      table.rows.front().ndcg_val == best.at("val_ndcg").get<double>()}};
  write_text_file(cache.dir() / "eval.json", info.dump(2) + "\n");
  cache.commit(key);
  note("eval " + label + ": top-n test nDCG@" + std::to_string(config_.n) + " " +
       format_double(table.rows.front().ndcg_test));
  // Hand back what a later reader of scores.csv would see.
  return strategy::parse_score_table(strategy::score_table_csv(table), scores_file.string());
}

void Pipeline::run_jobs(bool do_eval) {
  ensure_split();
  const auto jobs = all_jobs();
  statuses_.assign(jobs.size(), {});
  std::vector<std::optional<strategy::StrategyScoreTable>> tables(jobs.size());
  const unsigned outer = options_.jobs;
  const unsigned inner = outer > jobs.size() ? outer / static_cast<unsigned>(jobs.size()) : 1;

  parallel_for(jobs.size(), outer, [&](std::size_t i) {
    const auto& job = jobs[i];
    auto& status = statuses_[i];
    status.id = job;
    status.stage = "prep";
    try {
      if (!dataset_errors_[job.dataset].empty()) throw Error(dataset_errors_[job.dataset]);
      status.stage = "tune";
      tune_job(job, status, inner);
      if (do_eval) {
        status.stage = "eval";
        tables[i] = eval_job(job, status, inner);
      }
      status.stage.clear();
    } catch (const std::exception& e) {
      status.ok = false;
      status.error = e.what();
      note("job " + config_.datasets[job.dataset].name + "/" +
           config_.algorithms[job.algorithm].name + "/rep" + std::to_string(job.repetition) +
           ": FAILED in " + status.stage + ": " + e.what());
    }
  });

  failures_ = 0;
  for (const auto& s : statuses_) failures_ += s.ok ? 0 : 1;
  if (do_eval) {
    ReportInputs live = report_skeleton();
    for (auto& t : tables) {
      if (t) live.tables.push_back(std::move(*t));
    }
    live_ = std::move(live);
  }
}

bool Pipeline::ok() const noexcept {
  if (failures_ != 0) return false;
  for (const auto& e : dataset_errors_) {
    if (!e.empty()) return false;
  }
  return true;
}

void Pipeline::prep() { ensure_prepared(); }

void Pipeline::split() { ensure_split(); }

void Pipeline::tune() {
  if (tune_done_) return;
  stage_started("tune");
  run_jobs(false);
  tune_done_ = true;
  stage_finished("tune");
}

void Pipeline::eval() {
  if (eval_done_) return;
  stage_started("eval");
  run_jobs(true);
  tune_done_ = eval_done_ = true;
  stage_finished("eval");
}

ReportInputs Pipeline::report_skeleton() const {
  ReportInputs in;
  for (const auto& d : config_.datasets) {
    in.datasets.push_back({d.name, d.domain, std::string(corpus::to_string(d.feedback))});
  }
  for (const auto& a : config_.algorithms) in.algorithms.push_back(a.name);
  in.K = config_.K;
  in.n = config_.n;
  in.alpha = config_.nemenyi_alpha;
  return in;
}

ReportInputs Pipeline::load_report_inputs() const {
  auto in = report_skeleton();
  for (const auto& job : all_jobs()) {
    const auto file = eval_dir(job) / "scores.csv";
    if (fs::exists(file)) in.tables.push_back(strategy::read_score_table(file));
  }
  return in;
}

const ReportInputs& Pipeline::report_inputs() {
  if (!live_) {
    eval();
  }
  return *live_;
}

void Pipeline::stats() {
  const auto& in = report_inputs();
  stage_started("stats");
  write_text_file(out() / "stats.json", compute_stats(in).dump(2) + "\n");
  stage_finished("stats");
  note("stats: wrote " + (out() / "stats.json").string());
}

void Pipeline::report() {
  const auto& in = report_inputs();
  stage_started("report");
  write_reports(out() / "report", render_reports(in));
  stage_finished("report");
  note("report: wrote " + (out() / "report").string());
}

void Pipeline::run_all() {
  prep();
  split();
  eval();
  stats();
  report();
  write_manifest();
}

json Pipeline::manifest() const {
  json datasets = json::array();
  for (std::size_t d = 0; d < config_.datasets.size(); ++d) {
    json entry = {{"name", config_.datasets[d].name}};
    const auto file = prep_dir(d) / "manifest.json";
    if (fs::exists(file)) entry["prep"] = json::parse(read_text_file(file));
    entry["error"] = dataset_errors_[d].empty() ? json(nullptr) : json(dataset_errors_[d]);
    datasets.push_back(std::move(entry));
  }

  json jobs = json::array();
  bool success = true;
  const auto ids = all_jobs();
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const auto& job = ids[i];
    json entry = {{"dataset", config_.datasets[job.dataset].name},
                  {"algorithm", config_.algorithms[job.algorithm].name},
                  {"repetition", job.repetition}};
    const JobStatus* status = i < statuses_.size() ? &statuses_[i] : nullptr;
    const auto best_file = tune_dir(job) / "best.json";
    const auto scores_file = eval_dir(job) / "scores.csv";
    const auto eval_file = eval_dir(job) / "eval.json";
    if (status && !status->ok) {
      entry["status"] = "failed";
      entry["failed_stage"] = status->stage;
      entry["error"] = status->error;
      success = false;
    } else if (fs::exists(scores_file)) {
      entry["status"] = "evaluated";
    } else if (fs::exists(best_file)) {
      entry["status"] = "tuned";
    } else {
      entry["status"] = "pending";
    }
    if (fs::exists(best_file)) entry["best"] = json::parse(read_text_file(best_file));
    if (fs::exists(eval_file)) entry["evaluation"] = json::parse(read_text_file(eval_file));
    if (fs::exists(scores_file)) entry["scores_sha256"] = sha256_file(scores_file);
    jobs.push_back(std::move(entry));
  }

  json runtime = runtime_;
  runtime["written_at"] = iso_timestamp();
  runtime["jobs"] = options_.jobs;
  runtime["output_dir"] = out().string();
  runtime["data_root"] = config_.data_root.string();

  return {{"format", kManifestFormat},
          {"software", {{"name", "selbench"}, {"version", std::string(version())}}},
          {"config_hash", config_.content_hash()},
          {"config", config_.content_json()},
          {"decisions", decision_flags()},
          {"datasets", datasets},
          {"jobs", jobs},
          {"success", success && ok()},
          {"runtime", runtime}};
}

void Pipeline::write_manifest() {
  write_text_file(out() / "manifest.json", manifest().dump(2) + "\n");
}

}  // namespace selbench::pipeline
