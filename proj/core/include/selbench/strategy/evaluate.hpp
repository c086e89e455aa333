#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "selbench/corpus/matrix.hpp"
#include "selbench/recsys/model.hpp"
#include "selbench/strategy/strategy.hpp"

namespace selbench::strategy {

/// One user's top-K predictions and held-out items on one split.
struct UserEval {
  UserIndex user = 0;
  std::vector<ItemIndex> top_k;
  std::vector<ItemIndex> relevant;  // sorted ascending, nonempty
};

/// Candidate depth K, selection size n, and the users that take part in the
/// averages (those with a nonempty relevant set).
struct EvalContext {
  std::size_t K = 10;
  std::size_t n = 5;
  std::vector<UserEval> users;

  void validate() const;
};

/// Predicts top-K for every user with held-out items in `relevance`,
/// excluding each user's items in every matrix of `exclude`.
EvalContext build_eval_context(const recsys::ModelState& model,
                               const corpus::InteractionMatrix& relevance,
                               std::span<const corpus::InteractionMatrix* const> exclude,
                               std::size_t K, std::size_t n, unsigned threads = 1);

/// Per-strategy means over the context's users for one split.
struct StrategyScores {
  std::vector<double> ndcg;
  std::vector<double> precision;
  std::size_t users = 0;
};

/// Means are reduced in user order, so results are bit-identical for any
/// thread count. Throws ConfigError when the context has no users.
StrategyScores score_strategies(const EvalContext& ctx,
                                std::span<const SelectionStrategy> strategies,
                                unsigned threads = 1);

struct TableKey {
  std::string dataset;
  std::string algorithm;
  int repetition = 0;
};

struct StrategyRow {
  SelectionStrategy strategy;
  double ndcg_val = 0.0;
  double ndcg_test = 0.0;
  double prec_val = 0.0;
  double prec_test = 0.0;
  std::size_t users = 0;  // test users averaged over

  friend bool operator==(const StrategyRow&, const StrategyRow&) = default;
};

struct StrategyScoreTable {
  TableKey key;
  std::size_t K = 10;
  std::size_t n = 5;
  std::size_t validation_users = 0;
  std::size_t test_users = 0;
  std::vector<StrategyRow> rows;  // indexed by strategy id
};

StrategyScoreTable evaluate_strategies(const EvalContext& validation, const EvalContext& test,
                                       std::span<const SelectionStrategy> strategies,
                                       TableKey key, unsigned threads = 1);

enum class Split { validation, test };
enum class Metric { ndcg, precision };

double row_value(const StrategyRow& row, Split split, Metric metric);

struct RelativeBest {
  std::size_t best_id = 0;            // best strategy other than top-n
  double best_score = 0.0;
  double top_n_score = 0.0;
  std::optional<double> ratio;        // unset when the top-n score is 0
};

/// Best non-top-n strategy (lowest id on ties) and its score relative to the
/// top-n strategy.
RelativeBest relative_best(const StrategyScoreTable& table, Split split,
                           Metric metric = Metric::ndcg);

struct IndexBreakdown {
  std::size_t index = 0;
  std::vector<std::pair<std::size_t, double>> strategies;  // (id, mean score)
};

/// For each list position 0..K-1, the strategies that select it and their
/// scores.
std::vector<IndexBreakdown> per_index_breakdown(const StrategyScoreTable& table,
                                                std::span<const SelectionStrategy> strategies,
                                                Split split, Metric metric = Metric::ndcg);

/// Rank (1 = best, ties share the lowest rank) of strategy `id` by `split`
/// and `metric`.
std::size_t strategy_position(const StrategyScoreTable& table, std::size_t id, Split split,
                              Metric metric = Metric::ndcg);

/// Row-wise mean of tables with identical shapes (e.g. over repetitions).
StrategyScoreTable average_tables(std::span<const StrategyScoreTable> tables, TableKey key);

/// strategy_id,indices,ndcg_val,ndcg_test,prec_val,prec_test,users,dataset,algorithm,repetition
std::string score_table_csv(const StrategyScoreTable& table);
void write_score_table(const std::filesystem::path& path, const StrategyScoreTable& table);
StrategyScoreTable read_score_table(const std::filesystem::path& path);
StrategyScoreTable parse_score_table(std::string_view csv, std::string_view source);

}  // namespace selbench::strategy
