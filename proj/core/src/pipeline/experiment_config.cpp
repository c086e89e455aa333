#include "selbench/pipeline/experiment_config.hpp"

#include <cstdlib>
#include <set>

#include "selbench/common.hpp"

namespace selbench::pipeline {

using nlohmann::json;

namespace {

corpus::ColumnRef column_from_json(const json& j) {
  if (j.is_number_unsigned() || j.is_number_integer()) return j.get<std::size_t>();
  return j.get<std::string>();
}

json column_to_json(const corpus::ColumnRef& c) {
  if (const auto* i = std::get_if<std::size_t>(&c)) return *i;
  return std::get<std::string>(c);
}

corpus::ColumnSchema schema_from_json(const json& j) {
  if (j.is_string()) {
    const auto name = j.get<std::string>();
    if (name == "movielens-100k") return corpus::ColumnSchema::movielens_100k();
    if (name == "movielens-1m") return corpus::ColumnSchema::movielens_1m();
    if (name == "canonical") return corpus::ColumnSchema::canonical();
    throw ConfigError("unknown dataset format preset '" + name + "'");
  }
  corpus::ColumnSchema s;
  s.delimiter = j.value("delimiter", std::string(","));
  if (s.delimiter == "\\t" || s.delimiter == "tab") s.delimiter = "\t";
  s.header = j.value("header", false);
  s.user = column_from_json(j.at("user"));
  s.item = column_from_json(j.at("item"));
  if (j.contains("rating") && !j.at("rating").is_null()) s.rating = column_from_json(j.at("rating"));
  if (j.contains("timestamp") && !j.at("timestamp").is_null()) {
    s.timestamp = column_from_json(j.at("timestamp"));
  }
  return s;
}

json schema_to_json(const corpus::ColumnSchema& s) {
  json j = {{"delimiter", s.delimiter},
            {"header", s.header},
            {"user", column_to_json(s.user)},
            {"item", column_to_json(s.item)}};
  j["rating"] = s.rating ? column_to_json(*s.rating) : json(nullptr);
  j["timestamp"] = s.timestamp ? column_to_json(*s.timestamp) : json(nullptr);
  return j;
}

}  // namespace

json dataset_to_json(const DatasetSpec& d) {
  return {{"name", d.name},
          {"path", d.path.generic_string()},
          {"format", schema_to_json(d.schema)},
          {"feedback", std::string(corpus::to_string(d.feedback))},
          {"rating_scale", {d.binarize.scale_min, d.binarize.scale_max}},
          {"threshold_fraction", d.binarize.threshold_fraction},
          {"inclusive", d.binarize.inclusive},
          {"k_core", d.k_core},
          {"domain", d.domain}};
}

json algorithm_to_json(const AlgorithmSpec& a) {
  return {{"name", a.name}, {"space", tuner::space_to_json(a.space)}};
}

void ExperimentConfig::validate() const {
  if (n < 1 || n > K) throw ConfigError("config: need K >= n >= 1");
  if (repetitions < 1 || repetitions > corpus::kMaxRepetitions) {
    throw ConfigError("config: repetitions must lie in [1, " +
                      std::to_string(corpus::kMaxRepetitions) + "]");
  }
  if (trial_budget < 1) throw ConfigError("config: trial_budget must be >= 1");
  if (datasets.empty()) throw ConfigError("config: no datasets");
  if (algorithms.empty()) throw ConfigError("config: no algorithms");
  std::set<std::string> names;
  for (const auto& d : datasets) {
    if (d.name.empty() || !names.insert("d:" + d.name).second) {
      throw ConfigError("config: dataset names must be unique and nonempty");
    }
    if (d.k_core < 1) throw ConfigError("config: k_core must be >= 1");
    const auto p = dataset_path(d);
    if (!std::filesystem::exists(p)) {
      throw ConfigError("config: dataset '" + d.name + "' not found at " + p.string() +
                        " (set " + kDataRootEnv + " or fix the path)");
    }
  }
  for (const auto& a : algorithms) {
    if (a.name.empty() || !names.insert("a:" + a.name).second) {
      throw ConfigError("config: algorithm names must be unique and nonempty");
    }
    a.space.validate();
  }
}

std::filesystem::path ExperimentConfig::dataset_path(const DatasetSpec& d) const {
  return d.path.is_absolute() ? d.path : data_root / d.path;
}

json ExperimentConfig::content_json() const {
  json ds = json::array();
  for (const auto& d : datasets) ds.push_back(dataset_to_json(d));
  json algs = json::array();
  for (const auto& a : algorithms) algs.push_back(algorithm_to_json(a));
  json j = {{"datasets", ds},
            {"algorithms", algs},
            {"K", K},
            {"n", n},
            {"repetitions", repetitions},
            {"seed", seed},
            {"trial_budget", trial_budget},
            {"split", {{"train", ratios.train}, {"validation", ratios.validation}, {"test", ratios.test}}},
            {"nemenyi_alpha", nemenyi_alpha}};
  j["time_limit_seconds"] = time_limit_seconds ? json(*time_limit_seconds) : json(nullptr);
  return j;
}

std::string ExperimentConfig::content_hash() const { return sha256_hex(content_json().dump()); }

ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig c;
  c.K = j.value("K", c.K);
  c.n = j.value("n", c.n);
  c.repetitions = j.value("repetitions", c.repetitions);
  c.seed = j.value("seed", c.seed);
  c.trial_budget = j.value("trial_budget", c.trial_budget);
  if (j.contains("time_limit_seconds") && !j["time_limit_seconds"].is_null()) {
    c.time_limit_seconds = j["time_limit_seconds"].get<double>();
  }
  c.nemenyi_alpha = j.value("nemenyi_alpha", c.nemenyi_alpha);
  if (j.contains("split")) {
    const auto& s = j["split"];
    c.ratios = {s.value("train", 0.6), s.value("validation", 0.2), s.value("test", 0.2)};
  }
  c.output_dir = j.value("output_dir", std::string("out"));
  if (j.contains("data_root")) {
    c.data_root = j["data_root"].get<std::string>();
  } else if (const char* env = std::getenv(kDataRootEnv); env && *env) {
    c.data_root = env;
  }

  for (const auto& dj : j.at("datasets")) {
    DatasetSpec d;
    d.name = dj.at("name").get<std::string>();
    d.path = dj.at("path").get<std::string>();
    d.schema = schema_from_json(dj.value("format", json("movielens-100k")));
    d.feedback = corpus::feedback_from_string(dj.value("feedback", std::string("explicit")));
    if (dj.contains("rating_scale")) {
      d.binarize.scale_min = dj["rating_scale"].at(0).get<double>();
      d.binarize.scale_max = dj["rating_scale"].at(1).get<double>();
    }
    d.binarize.threshold_fraction = dj.value("threshold_fraction", 0.6);
    d.binarize.inclusive = dj.value("inclusive", true);
    d.k_core = dj.value("k_core", std::size_t{5});
    d.domain = dj.value("domain", std::string());
    if (d.feedback == corpus::FeedbackType::explicit_feedback && !d.schema.rating) {
      throw ConfigError("config: explicit dataset '" + d.name + "' has no rating column");
    }
    c.datasets.push_back(std::move(d));
  }

  for (const auto& aj : j.at("algorithms")) {
    AlgorithmSpec a;
    const auto algorithm = recsys::algorithm_from_string(aj.at("algorithm").get<std::string>());
    const auto weighting = recsys::weighting_from_string(aj.value("weighting", std::string("none")));
    a.name = aj.value("name", std::string(recsys::to_string(algorithm)));
    a.space = tuner::SearchSpace::defaults(algorithm, weighting);
    if (aj.contains("space")) a.space = tuner::space_from_json(aj["space"], a.space);
    a.space.validate();
    c.algorithms.push_back(std::move(a));
  }
  return c;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(read_text_file(path));
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return config_from_json(j);
}

}  // namespace selbench::pipeline
