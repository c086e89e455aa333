#include "selbench/tuner/random_search.hpp"

#include <chrono>
#include <limits>
#include <ostream>
#include <sstream>

namespace selbench::tuner {

std::vector<recsys::RecommenderConfig> draw_configs(const SearchSpace& space, std::size_t budget,
                                                    std::uint64_t seed) {
  space.validate();
  Rng rng(seed, "search");
  std::vector<recsys::RecommenderConfig> configs;
  configs.reserve(budget);
  for (std::size_t t = 0; t < budget; ++t) {
    auto c = sample_config(space, rng);
    c.seed = derive_seed(seed, "model", {t});
    configs.push_back(std::move(c));
  }
  return configs;
}

SearchResult random_search(const SearchSpace& space, const SearchOptions& options,
                           const Objective& objective) {
  if (options.budget < 1) throw ConfigError("random_search: budget must be >= 1");
  const auto configs = draw_configs(space, options.budget, options.seed);

  using clock = std::chrono::steady_clock;
  const auto started = clock::now();
  std::vector<Trial> trials(configs.size());
  std::vector<char> ran(configs.size(), 0);
  auto run_trial = [&](std::size_t t) {
    Trial& trial = trials[t];
    trial.index = t;
    trial.config = configs[t];
    const auto t0 = clock::now();
    try {
      trial.score = objective(trial.config);
    } catch (const std::exception& e) {
      trial.failed = true;
      trial.error = e.what();
    }
    if (trial.failed || std::isnan(trial.score)) {
      trial.failed = true;
      if (trial.error.empty()) trial.error = "objective returned NaN";
      trial.score = -std::numeric_limits<double>::infinity();
    }
    trial.seconds = std::chrono::duration<double>(clock::now() - t0).count();
    ran[t] = 1;
  };

  if (options.threads > 1 && !options.time_limit_seconds) {
    parallel_for(configs.size(), options.threads, run_trial);
  } else {
    for (std::size_t t = 0; t < configs.size(); ++t) {
      if (t > 0 && options.time_limit_seconds &&
          std::chrono::duration<double>(clock::now() - started).count() >
              *options.time_limit_seconds) {
        break;
      }
      run_trial(t);
    }
  }

  SearchResult result;
  for (std::size_t t = 0; t < trials.size(); ++t) {
    if (ran[t]) result.log.trials.push_back(std::move(trials[t]));
  }
  std::size_t best = 0;
  for (std::size_t t = 1; t < result.log.trials.size(); ++t) {
    if (result.log.trials[t].score > result.log.trials[best].score) best = t;
  }
  result.log.best = best;
  result.best = result.log.trials[best].config;
  return result;
}

void write_trial_log_csv(std::ostream& out, const TrialLog& log) {
  out << "trial,algorithm,hyperparameters,val_ndcg,seconds\n";
  for (const auto& t : log.trials) {
    out << t.index << ',' << recsys::to_string(t.config.algorithm) << ','
        << csv_escape(recsys::params_to_json(t.config.params).dump()) << ','
        << (t.failed ? std::string("-inf") : format_double(t.score)) << ','
        << format_double(t.seconds) << '\n';
  }
}

std::string trial_log_csv(const TrialLog& log) {
  std::ostringstream ss;
  write_trial_log_csv(ss, log);
  return ss.str();
}

}  // namespace selbench::tuner
