#include "selbench/recsys/config.hpp"

#include "selbench/common.hpp"

namespace selbench::recsys {

std::string_view to_string(Algorithm a) noexcept {
  switch (a) {
    case Algorithm::als: return "als";
    case Algorithm::bpr: return "bpr";
    case Algorithm::item_knn: return "item_knn";
    case Algorithm::user_knn: return "user_knn";
    case Algorithm::popularity: return "popularity";
    case Algorithm::random: return "random";
  }
  return "unknown";
}

Algorithm algorithm_from_string(std::string_view text) {
  for (auto a : {Algorithm::als, Algorithm::bpr, Algorithm::item_knn, Algorithm::user_knn,
                 Algorithm::popularity, Algorithm::random}) {
    if (to_string(a) == text) return a;
  }
  throw ConfigError("unknown algorithm '" + std::string(text) + "'");
}

std::string_view to_string(Weighting w) noexcept {
  switch (w) {
    case Weighting::none: return "none";
    case Weighting::tfidf: return "tfidf";
    case Weighting::bm25: return "bm25";
  }
  return "unknown";
}

Weighting weighting_from_string(std::string_view text) {
  if (text == "none" || text == "cosine") return Weighting::none;
  if (text == "tfidf") return Weighting::tfidf;
  if (text == "bm25") return Weighting::bm25;
  throw ConfigError("unknown weighting scheme '" + std::string(text) + "'");
}

std::int64_t RecommenderConfig::get_int(const std::string& name, std::int64_t fallback) const {
  auto it = params.find(name);
  if (it == params.end()) return fallback;
  if (const auto* v = std::get_if<std::int64_t>(&it->second)) return *v;
  if (const auto* d = std::get_if<double>(&it->second)) {
    if (*d == static_cast<double>(static_cast<std::int64_t>(*d))) {
      return static_cast<std::int64_t>(*d);
    }
  }
  throw ConfigError("hyperparameter '" + name + "' must be an integer");
}

double RecommenderConfig::get_real(const std::string& name, double fallback) const {
  auto it = params.find(name);
  if (it == params.end()) return fallback;
  if (const auto* v = std::get_if<double>(&it->second)) return *v;
  if (const auto* i = std::get_if<std::int64_t>(&it->second)) return static_cast<double>(*i);
  throw ConfigError("hyperparameter '" + name + "' must be numeric");
}

std::string RecommenderConfig::get_string(const std::string& name,
                                          const std::string& fallback) const {
  auto it = params.find(name);
  if (it == params.end()) return fallback;
  if (const auto* s = std::get_if<std::string>(&it->second)) return *s;
  throw ConfigError("hyperparameter '" + name + "' must be a string");
}

nlohmann::json params_to_json(const Hyperparameters& params) {
  auto j = nlohmann::json::object();
  for (const auto& [name, value] : params) {
    std::visit([&](const auto& v) { j[name] = v; }, value);
  }
  return j;
}

Hyperparameters params_from_json(const nlohmann::json& j) {
  Hyperparameters out;
  for (const auto& [name, value] : j.items()) {
    if (value.is_number_integer()) {
      out[name] = value.get<std::int64_t>();
    } else if (value.is_number()) {
      out[name] = value.get<double>();
    } else if (value.is_string()) {
      out[name] = value.get<std::string>();
    } else if (value.is_boolean()) {
      out[name] = std::int64_t{value.get<bool>() ? 1 : 0};
    } else {
      throw ConfigError("hyperparameter '" + name + "' has unsupported type");
    }
  }
  return out;
}

nlohmann::json config_to_json(const RecommenderConfig& config) {
  return {{"algorithm", std::string(to_string(config.algorithm))},
          {"params", params_to_json(config.params)},
          {"seed", config.seed}};
}

RecommenderConfig config_from_json(const nlohmann::json& j) {
  RecommenderConfig c;
  c.algorithm = algorithm_from_string(j.at("algorithm").get<std::string>());
  if (j.contains("params")) c.params = params_from_json(j.at("params"));
  c.seed = j.value("seed", std::uint64_t{0});
  return c;
}

}  // namespace selbench::recsys
