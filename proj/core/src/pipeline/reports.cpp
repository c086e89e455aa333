#include "selbench/pipeline/reports.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "selbench/common.hpp"
#include "selbench/stats/tests.hpp"

namespace selbench::pipeline {

using nlohmann::json;
using strategy::Metric;
using strategy::Split;
using strategy::StrategyScoreTable;

namespace {

constexpr const char* kNemenyiCaveat =
    "Strategies overlap in the list positions they select, so their scores are "
    "correlated; the Nemenyi test assumes independent treatments and its "
    "critical difference is approximate here.";

// Tables of one (dataset, algorithm), ordered by repetition.
std::vector<const StrategyScoreTable*> tables_for(const ReportInputs& in, const std::string& ds,
                                                  const std::string& algo) {
  std::vector<const StrategyScoreTable*> out;
  for (const auto& t : in.tables) {
    if (t.key.dataset == ds && t.key.algorithm == algo) out.push_back(&t);
  }
  std::sort(out.begin(), out.end(), [](const auto* a, const auto* b) {
    return a->key.repetition < b->key.repetition;
  });
  return out;
}

StrategyScoreTable averaged(const std::vector<const StrategyScoreTable*>& group) {
  std::vector<StrategyScoreTable> copies;
  copies.reserve(group.size());
  for (const auto* t : group) copies.push_back(*t);
  auto key = group.front()->key;
  key.repetition = -1;
  return strategy::average_tables(copies, key);
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::string optional_cell(const std::optional<double>& v) { return v ? format_double(*v) : ""; }

std::string domain_file_name(const std::string& domain) {
  std::string out;
  for (char c : domain.empty() ? std::string("unspecified") : domain) {
    const bool keep = std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_';
    out += keep ? c : '_';
  }
  return out;
}

}  // namespace

json compute_stats(const ReportInputs& in) {
  json algorithms = json::object();
  for (const auto& algo : in.algorithms) {
    std::vector<const StrategyScoreTable*> blocks;
    json correlations = json::object();
    for (const auto& ds : in.datasets) {
      const auto group = tables_for(in, ds.name, algo);
      if (group.empty()) continue;
      json reps = json::array();
      double sum = 0.0;
      std::size_t defined = 0;
      for (const auto* t : group) {
        std::vector<double> val, test;
        for (const auto& row : t->rows) {
          val.push_back(row.ndcg_val);
          test.push_back(row.ndcg_test);
        }
        const auto r = stats::pearson(val, test);
        reps.push_back({{"repetition", t->key.repetition}, {"pearson_r", optional_number(r.pearson_r)}});
        if (r.pearson_r) {
          sum += *r.pearson_r;
          ++defined;
        }
        blocks.push_back(t);
      }
      correlations[ds.name] = {
          {"repetitions", reps},
          {"mean_pearson_r", defined ? json(sum / static_cast<double>(defined)) : json(nullptr)}};
    }

    json entry = {{"blocks", blocks.size()}, {"treatments", in.tables.empty() ? 0 : in.tables.front().rows.size()},
                  {"validation_test_correlation", correlations}};
    if (blocks.size() >= 2) {
      const auto k = blocks.front()->rows.size();
      Eigen::MatrixXd m(static_cast<Eigen::Index>(blocks.size()), static_cast<Eigen::Index>(k));
      for (std::size_t b = 0; b < blocks.size(); ++b) {
        if (blocks[b]->rows.size() != k) throw ConfigError("stats: tables differ in strategy count");
        for (std::size_t s = 0; s < k; ++s) {
          m(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(s)) = blocks[b]->rows[s].ndcg_test;
        }
      }
      const auto fr = stats::friedman(m);
      const auto nm = stats::nemenyi(fr, in.alpha);
      const auto best = std::min_element(fr.mean_ranks.begin(), fr.mean_ranks.end());
      entry["friedman"] = {{"statistic", fr.statistic},
                           {"p_value", fr.p_value},
                           {"k", fr.k},
                           {"N", fr.N},
                           {"tie_correction", fr.tie_correction},
                           {"top_n_mean_rank", fr.mean_ranks.front()},
                           {"best_mean_rank", *best},
                           {"best_strategy_id", static_cast<std::size_t>(best - fr.mean_ranks.begin())}};
      entry["nemenyi"] = {{"alpha", nm.alpha},
                          {"q_alpha", nm.q_alpha},
                          {"critical_difference", nm.critical_difference},
                          {"not_different_from_best", optional_number(nm.not_different_with_best)},
                          {"top_n_not_different_from_best",
                           fr.mean_ranks.front() <= *best + nm.critical_difference}};
    } else {
      entry["friedman"] = nullptr;
      entry["nemenyi"] = nullptr;
      entry["note"] = "fewer than two blocks; rank tests skipped";
    }
    algorithms[algo] = std::move(entry);
  }
  return {{"metric", "ndcg"},
          {"split", "test"},
          {"K", in.K},
          {"n", in.n},
          {"alpha", in.alpha},
          {"blocks", "dataset x repetition"},
          {"treatments", "selection strategies"},
          {"caveat", kNemenyiCaveat},
          {"algorithms", algorithms}};
}

std::map<std::string, std::string> render_reports(const ReportInputs& in) {
  const auto strategies = strategy::enumerate_strategies(in.K, in.n);
  std::map<std::string, std::string> files;

  const std::string scatter_header =
      "dataset,domain,feedback,algorithm,repetitions,top_n_ndcg_test,best_strategy_id,"
      "best_indices,best_ndcg_test,relative_best,top_n_position\n";
  std::string scatter = scatter_header;
  std::map<std::string, std::string> by_domain;
  std::string per_index =
      "dataset,algorithm,index,strategy_id,indices,ndcg_test\n";
  std::string generalization =
      "dataset,algorithm,strategy_id,indices,ndcg_val,ndcg_test,relative_val,relative_test\n";

  for (const auto& ds : in.datasets) {
    for (const auto& algo : in.algorithms) {
      const auto group = tables_for(in, ds.name, algo);
      if (group.empty()) continue;
      const auto table = averaged(group);
      const auto rb = strategy::relative_best(table, Split::test);
      const auto& best = table.rows.at(rb.best_id).strategy;
      std::string row = csv_escape(ds.name) + ',' + csv_escape(ds.domain) + ',' +
                        ds.feedback + ',' + csv_escape(algo) + ',' +
                        std::to_string(group.size()) + ',' + format_double(rb.top_n_score) + ',' +
                        std::to_string(rb.best_id) + ',' + best.label() + ',' +
                        format_double(rb.best_score) + ',' + optional_cell(rb.ratio) + ',' +
                        std::to_string(strategy::strategy_position(table, 0, Split::test)) + '\n';
      scatter += row;
      auto& domain_csv = by_domain[domain_file_name(ds.domain)];
      if (domain_csv.empty()) domain_csv = scatter_header;
      domain_csv += row;

      for (const auto& bucket : strategy::per_index_breakdown(table, strategies, Split::test)) {
        for (const auto& [id, score] : bucket.strategies) {
          per_index += csv_escape(ds.name) + ',' + csv_escape(algo) + ',' +
                       std::to_string(bucket.index) + ',' + std::to_string(id) + ',' +
                       strategies[id].label() + ',' + format_double(score) + '\n';
        }
      }

      const double top_val = table.rows.front().ndcg_val;
      const double top_test = table.rows.front().ndcg_test;
      for (const auto& r : table.rows) {
        generalization += csv_escape(ds.name) + ',' + csv_escape(algo) + ',' +
                          std::to_string(r.strategy.id) + ',' + r.strategy.label() + ',' +
                          format_double(r.ndcg_val) + ',' + format_double(r.ndcg_test) + ',' +
                          (top_val > 0.0 ? format_double(r.ndcg_val / top_val) : "") + ',' +
                          (top_test > 0.0 ? format_double(r.ndcg_test / top_test) : "") + '\n';
      }
    }
  }

  files["scatter.csv"] = std::move(scatter);
  for (auto& [name, csv] : by_domain) files["domains/" + name + ".csv"] = std::move(csv);
  files["per_index.csv"] = std::move(per_index);
  files["generalization.csv"] = std::move(generalization);
  files["stats.json"] = compute_stats(in).dump(2) + "\n";
  return files;
}

void write_reports(const std::filesystem::path& dir,
                   const std::map<std::string, std::string>& files) {
  for (const auto& [name, contents] : files) write_text_file(dir / name, contents);
}

}  // namespace selbench::pipeline
