#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "selbench/corpus/interactions.hpp"
#include "selbench/corpus/preprocess.hpp"
#include "selbench/corpus/split.hpp"
#include "selbench/tuner/search_space.hpp"

namespace selbench::pipeline {

/// Environment variable naming the directory relative dataset paths resolve
/// against.
inline constexpr const char* kDataRootEnv = "SELBENCH_DATA_ROOT";

struct DatasetSpec {
  std::string name;
  std::filesystem::path path;
  corpus::ColumnSchema schema;
  corpus::FeedbackType feedback = corpus::FeedbackType::explicit_feedback;
  corpus::BinarizeOptions binarize;
  std::size_t k_core = 5;
  std::string domain;
};

struct AlgorithmSpec {
  std::string name;  // e.g. "item_knn_bm25"
  tuner::SearchSpace space;
};

struct ExperimentConfig {
  std::vector<DatasetSpec> datasets;
  std::vector<AlgorithmSpec> algorithms;
  std::size_t K = 10;
  std::size_t n = 5;
  int repetitions = 5;
  std::uint64_t seed = 42;
  std::size_t trial_budget = 50;
  std::optional<double> time_limit_seconds;
  corpus::SplitRatios ratios;
  double nemenyi_alpha = 0.05;
  std::filesystem::path output_dir = "out";
  std::filesystem::path data_root = "data";

  /// K >= n >= 1, 1 <= repetitions <= 5, budget >= 1, unique names, and
  /// every dataset file present.
  void validate() const;
  std::filesystem::path dataset_path(const DatasetSpec& d) const;

  /// Everything that determines results. Output and data locations are left
  /// out so relocated runs hash identically.
  nlohmann::json content_json() const;
  std::string content_hash() const;
};

/// Parses the JSON experiment description. The data root is taken from
/// `data_root` in the file, else SELBENCH_DATA_ROOT, else "data".
ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

nlohmann::json dataset_to_json(const DatasetSpec& d);
nlohmann::json algorithm_to_json(const AlgorithmSpec& a);

}  // namespace selbench::pipeline
