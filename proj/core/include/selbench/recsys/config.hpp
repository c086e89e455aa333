#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <variant>

#include <nlohmann/json.hpp>

namespace selbench::recsys {

enum class Algorithm { als, bpr, item_knn, user_knn, popularity, random };

std::string_view to_string(Algorithm a) noexcept;
Algorithm algorithm_from_string(std::string_view text);

enum class Weighting { none, tfidf, bm25 };

std::string_view to_string(Weighting w) noexcept;
Weighting weighting_from_string(std::string_view text);

using ParamValue = std::variant<std::int64_t, double, std::string>;
using Hyperparameters = std::map<std::string, ParamValue>;

/// Algorithm tag, hyperparameters and the seed for any model randomness.
///
/// Recognised names: factors, regularization, confidence_alpha, iterations
/// (ALS); factors, learning_rate, regularization, epochs (BPR); neighbors,
/// weighting, bm25_k1, bm25_b, normalize (kNN). Missing names fall back to
/// the defaults documented in README.md.
struct RecommenderConfig {
  Algorithm algorithm = Algorithm::popularity;
  Hyperparameters params;
  std::uint64_t seed = 0;

  std::int64_t get_int(const std::string& name, std::int64_t fallback) const;
  double get_real(const std::string& name, double fallback) const;
  std::string get_string(const std::string& name, const std::string& fallback) const;

  friend bool operator==(const RecommenderConfig&, const RecommenderConfig&) = default;
};

nlohmann::json params_to_json(const Hyperparameters& params);
Hyperparameters params_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const RecommenderConfig& config);
RecommenderConfig config_from_json(const nlohmann::json& j);

}  // namespace selbench::recsys
