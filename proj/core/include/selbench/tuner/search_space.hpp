#pragma once

#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "selbench/common.hpp"
#include "selbench/recsys/config.hpp"

namespace selbench::tuner {

/// Uniform integer on the half-open range [low, high).
struct IntRange {
  std::int64_t low = 0;
  std::int64_t high = 1;
};

/// Uniform real on [low, high).
struct RealRange {
  double low = 0.0;
  double high = 1.0;
};

/// exp(uniform(log low, log high)).
struct LogRealRange {
  double low = 1e-3;
  double high = 1.0;
};

/// Constant; takes part in the config but never in the draw.
struct Fixed {
  recsys::ParamValue value;
};

using Distribution = std::variant<IntRange, RealRange, LogRealRange, Fixed>;

struct SearchSpace {
  recsys::Algorithm algorithm = recsys::Algorithm::popularity;
  /// Sampled in this order, one draw per non-fixed dimension.
  std::vector<std::pair<std::string, Distribution>> dimensions;

  /// Throws ConfigError for non-finite bounds or low >= high.
  void validate() const;
  /// True when at least one dimension is random.
  bool tunable() const;

  void set(const std::string& name, Distribution d);

  /// Documented default ranges around library defaults:
  ///   als         factors [16,128], regularization log[1e-3,1],
  ///               confidence_alpha [1,100], iterations [10,30]
  ///   bpr         factors [16,128], learning_rate log[1e-4,0.1],
  ///               regularization log[1e-4,0.1], epochs [10,100]
  ///   item/user   neighbors [5,100]; with bm25 weighting also
  ///   knn         bm25_k1 [0.5,3], bm25_b [0,1]
  ///   popularity, random: nothing to tune
  /// Integer bounds above are inclusive.
  static SearchSpace defaults(recsys::Algorithm algorithm,
                              recsys::Weighting weighting = recsys::Weighting::none);
};

nlohmann::json space_to_json(const SearchSpace& space);
/// Accepts {"name": {"int": [lo, hi]}} (inclusive), {"real": [lo, hi]},
/// {"log": [lo, hi]} or a bare value for a fixed dimension. Entries replace
/// dimensions already present in `base`.
SearchSpace space_from_json(const nlohmann::json& j, SearchSpace base);

/// Draws every dimension in order from `rng`. The returned config's seed is 0;
/// the caller assigns one.
recsys::RecommenderConfig sample_config(const SearchSpace& space, Rng& rng);

}  // namespace selbench::tuner
