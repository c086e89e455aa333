#include "selbench/strategy/evaluate.hpp"

#include <algorithm>

#include "selbench/strategy/metrics.hpp"

namespace selbench::strategy {

void EvalContext::validate() const {
  if (n < 1 || n > K) throw ConfigError("EvalContext: need 1 <= n <= K");
  for (const auto& u : users) {
    if (u.top_k.size() < K) {
      throw ConfigError("EvalContext: user " + std::to_string(u.user) + " has fewer than K predictions");
    }
    if (u.relevant.empty()) {
      throw ConfigError("EvalContext: user " + std::to_string(u.user) + " has no relevant items");
    }
    if (!std::is_sorted(u.relevant.begin(), u.relevant.end())) {
      throw ConfigError("EvalContext: relevant items must be sorted");
    }
  }
}

EvalContext build_eval_context(const recsys::ModelState& model,
                               const corpus::InteractionMatrix& relevance,
                               std::span<const corpus::InteractionMatrix* const> exclude,
                               std::size_t K, std::size_t n, unsigned threads) {
  EvalContext ctx;
  ctx.K = K;
  ctx.n = n;
  std::vector<UserIndex> users;
  for (UserIndex u = 0; u < relevance.n_users(); ++u) {
    if (!relevance.row(u).empty()) users.push_back(u);
  }
  ctx.users.resize(users.size());
  parallel_for(users.size(), threads, [&](std::size_t k) {
    const auto u = users[k];
    std::vector<ItemIndex> excluded;
    for (const auto* m : exclude) {
      const auto row = m->row(u);
      excluded.insert(excluded.end(), row.begin(), row.end());
    }
    auto ranked = recsys::recommend(model, u, excluded, K);
    const auto rel = relevance.row(u);
    ctx.users[k] = UserEval{u, std::move(ranked.items), {rel.begin(), rel.end()}};
  });
  return ctx;
}

StrategyScores score_strategies(const EvalContext& ctx,
                                std::span<const SelectionStrategy> strategies, unsigned threads) {
  ctx.validate();
  if (ctx.users.empty()) throw ConfigError("evaluate: no users with held-out items");
  const std::size_t n_strat = strategies.size();
  for (const auto& s : strategies) {
    if (s.indices.size() != ctx.n) throw ConfigError("evaluate: strategy size differs from n");
  }

  StrategyScores out;
  out.ndcg.assign(n_strat, 0.0);
  out.precision.assign(n_strat, 0.0);
  out.users = ctx.users.size();

  // Per-user values are computed in parallel chunks and then added to the
  // running sums strictly in user order.
  constexpr std::size_t kChunk = 2048;
  std::vector<double> chunk_ndcg, chunk_prec;
  for (std::size_t begin = 0; begin < ctx.users.size(); begin += kChunk) {
    const std::size_t end = std::min(begin + kChunk, ctx.users.size());
    chunk_ndcg.assign((end - begin) * n_strat, 0.0);
    chunk_prec.assign((end - begin) * n_strat, 0.0);
    parallel_for(end - begin, threads, [&](std::size_t k) {
      const auto& ue = ctx.users[begin + k];
      std::vector<char> hit_at(ctx.K);
      for (std::size_t pos = 0; pos < ctx.K; ++pos) {
        hit_at[pos] = std::binary_search(ue.relevant.begin(), ue.relevant.end(), ue.top_k[pos]);
      }
      std::vector<char> hits(ctx.n);
      for (std::size_t s = 0; s < n_strat; ++s) {
        std::size_t count = 0;
        for (std::size_t pos = 0; pos < ctx.n; ++pos) {
          hits[pos] = hit_at[strategies[s].indices[pos]];
          count += hits[pos] ? 1 : 0;
        }
        chunk_ndcg[k * n_strat + s] = ndcg_from_hits(hits, ue.relevant.size());
        chunk_prec[k * n_strat + s] = static_cast<double>(count) / static_cast<double>(ctx.n);
      }
    });
    for (std::size_t k = 0; k < end - begin; ++k) {
      for (std::size_t s = 0; s < n_strat; ++s) {
        out.ndcg[s] += chunk_ndcg[k * n_strat + s];
        out.precision[s] += chunk_prec[k * n_strat + s];
      }
    }
  }
  const double count = static_cast<double>(out.users);
  for (std::size_t s = 0; s < n_strat; ++s) {
    out.ndcg[s] /= count;
    out.precision[s] /= count;
  }
  return out;
}

StrategyScoreTable evaluate_strategies(const EvalContext& validation, const EvalContext& test,
                                       std::span<const SelectionStrategy> strategies,
                                       TableKey key, unsigned threads) {
  if (validation.K != test.K || validation.n != test.n) {
    throw ConfigError("evaluate: validation and test contexts disagree on K or n");
  }
  const auto val = score_strategies(validation, strategies, threads);
  const auto tst = score_strategies(test, strategies, threads);
  StrategyScoreTable table;
  table.key = std::move(key);
  table.K = test.K;
  table.n = test.n;
  table.validation_users = val.users;
  table.test_users = tst.users;
  table.rows.reserve(strategies.size());
  for (std::size_t s = 0; s < strategies.size(); ++s) {
    table.rows.push_back({strategies[s], val.ndcg[s], tst.ndcg[s], val.precision[s],
                          tst.precision[s], tst.users});
  }
  return table;
}

double row_value(const StrategyRow& row, Split split, Metric metric) {
  if (metric == Metric::ndcg) return split == Split::validation ? row.ndcg_val : row.ndcg_test;
  return split == Split::validation ? row.prec_val : row.prec_test;
}

RelativeBest relative_best(const StrategyScoreTable& table, Split split, Metric metric) {
  if (table.rows.size() < 2) throw ConfigError("relative_best: table needs at least two strategies");
  const StrategyRow* top = nullptr;
  for (const auto& r : table.rows) {
    if (r.strategy.is_top_n()) top = &r;
  }
  if (!top) throw ConfigError("relative_best: table has no top-n strategy");
  RelativeBest out;
  out.top_n_score = row_value(*top, split, metric);
  bool found = false;
  for (const auto& r : table.rows) {
    if (r.strategy.is_top_n()) continue;
    const double v = row_value(r, split, metric);
    if (!found || v > out.best_score || (v == out.best_score && r.strategy.id < out.best_id)) {
      out.best_score = v;
      out.best_id = r.strategy.id;
      found = true;
    }
  }
  if (out.top_n_score > 0.0) out.ratio = out.best_score / out.top_n_score;
  return out;
}

std::vector<IndexBreakdown> per_index_breakdown(const StrategyScoreTable& table,
                                                std::span<const SelectionStrategy> strategies,
                                                Split split, Metric metric) {
  if (strategies.size() != table.rows.size()) {
    throw ConfigError("per_index_breakdown: table and strategies are not aligned");
  }
  std::vector<IndexBreakdown> out(table.K);
  for (std::size_t i = 0; i < table.K; ++i) out[i].index = i;
  for (std::size_t s = 0; s < strategies.size(); ++s) {
    if (table.rows[s].strategy != strategies[s]) {
      throw ConfigError("per_index_breakdown: table and strategies are not aligned");
    }
    const double v = row_value(table.rows[s], split, metric);
    for (auto i : strategies[s].indices) out[i].strategies.emplace_back(strategies[s].id, v);
  }
  return out;
}

std::size_t strategy_position(const StrategyScoreTable& table, std::size_t id, Split split,
                              Metric metric) {
  if (id >= table.rows.size()) throw ConfigError("strategy_position: id out of range");
  const double v = row_value(table.rows[id], split, metric);
  std::size_t better = 0;
  for (const auto& r : table.rows) {
    if (row_value(r, split, metric) > v) ++better;
  }
  return better + 1;
}

StrategyScoreTable average_tables(std::span<const StrategyScoreTable> tables, TableKey key) {
  if (tables.empty()) throw ConfigError("average_tables: no tables");
  StrategyScoreTable out = tables.front();
  out.key = std::move(key);
  for (std::size_t t = 1; t < tables.size(); ++t) {
    if (tables[t].rows.size() != out.rows.size() || tables[t].K != out.K || tables[t].n != out.n) {
      throw ConfigError("average_tables: shape mismatch");
    }
    out.validation_users += tables[t].validation_users;
    out.test_users += tables[t].test_users;
    for (std::size_t s = 0; s < out.rows.size(); ++s) {
      auto& r = out.rows[s];
      const auto& o = tables[t].rows[s];
      r.ndcg_val += o.ndcg_val;
      r.ndcg_test += o.ndcg_test;
      r.prec_val += o.prec_val;
      r.prec_test += o.prec_test;
      r.users += o.users;
    }
  }
  const double m = static_cast<double>(tables.size());
  for (auto& r : out.rows) {
    r.ndcg_val /= m;
    r.ndcg_test /= m;
    r.prec_val /= m;
    r.prec_test /= m;
  }
  return out;
}

}  // namespace selbench::strategy
