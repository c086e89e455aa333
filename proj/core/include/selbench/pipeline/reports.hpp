#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "selbench/strategy/evaluate.hpp"

namespace selbench::pipeline {

struct DatasetMeta {
  std::string name;
  std::string domain;
  std::string feedback;
};

/// What the stats and report stages consume. Tables may arrive in any order;
/// output follows `datasets` and `algorithms` order, then repetition.
struct ReportInputs {
  std::vector<DatasetMeta> datasets;
  std::vector<std::string> algorithms;
  std::size_t K = 10;
  std::size_t n = 5;
  double alpha = 0.05;
  std::vector<strategy::StrategyScoreTable> tables;
};

/// Per algorithm: Friedman over blocks (dataset x repetition) with the
/// strategies as treatments on test nDCG, the Nemenyi critical difference,
/// and validation/test Pearson correlations per table.
nlohmann::json compute_stats(const ReportInputs& inputs);

/// Report files keyed by path relative to the report directory:
///   scatter.csv           relative best vs top-n per (dataset, algorithm)
///   domains/<d>.csv       the same rows restricted to one domain
///   per_index.csv         scores of the strategies selecting each position
///   generalization.csv    validation and test score per strategy
///   stats.json            compute_stats()
std::map<std::string, std::string> render_reports(const ReportInputs& inputs);

void write_reports(const std::filesystem::path& dir,
                   const std::map<std::string, std::string>& files);

}  // namespace selbench::pipeline
