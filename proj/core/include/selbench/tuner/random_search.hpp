#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "selbench/tuner/search_space.hpp"

namespace selbench::tuner {

struct Trial {
  std::size_t index = 0;
  recsys::RecommenderConfig config;
  double score = 0.0;  // -infinity when failed
  double seconds = 0.0;
  bool failed = false;
  std::string error;
};

struct TrialLog {
  std::vector<Trial> trials;
  std::size_t best = 0;  // highest score, earliest on ties
};

struct SearchOptions {
  std::size_t budget = 50;
  std::uint64_t seed = 0;
  /// Trials evaluated concurrently. The config sequence is drawn up front, so
  /// this never changes which configs are tried or which one wins.
  unsigned threads = 1;
  /// Optional wall-clock cap; trials not started before it expires are
  /// skipped (sequential mode only).
  std::optional<double> time_limit_seconds;
};

using Objective = std::function<double(const recsys::RecommenderConfig&)>;

struct SearchResult {
  recsys::RecommenderConfig best;
  TrialLog log;
};

/// The first `budget` configs of the stream (seed, "search"); trial t gets
/// model seed derive_seed(seed, "model", {t}).
std::vector<recsys::RecommenderConfig> draw_configs(const SearchSpace& space, std::size_t budget,
                                                    std::uint64_t seed);

/// Evaluates `budget` sampled configs and returns the best. An objective that
/// throws marks its trial failed with score -infinity and the search goes on.
SearchResult random_search(const SearchSpace& space, const SearchOptions& options,
                           const Objective& objective);

/// `trial,algorithm,hyperparameters,val_ndcg,seconds` with JSON-encoded
/// hyperparameters.
void write_trial_log_csv(std::ostream& out, const TrialLog& log);
std::string trial_log_csv(const TrialLog& log);

}  // namespace selbench::tuner
