#include <sstream>

#include "selbench/strategy/evaluate.hpp"

namespace selbench::strategy {

namespace {

constexpr std::string_view kHeader =
    "strategy_id,indices,ndcg_val,ndcg_test,prec_val,prec_test,users,dataset,algorithm,repetition";

}  // namespace

std::string score_table_csv(const StrategyScoreTable& table) {
  std::string out(kHeader);
  out += '\n';
  const auto dataset = csv_escape(table.key.dataset);
  const auto algorithm = csv_escape(table.key.algorithm);
  const auto rep = std::to_string(table.key.repetition);
  for (const auto& r : table.rows) {
    out += std::to_string(r.strategy.id);
    out += ',';
    out += r.strategy.label();
    for (double v : {r.ndcg_val, r.ndcg_test, r.prec_val, r.prec_test}) {
      out += ',';
      out += format_double(v);
    }
    out += ',';
    out += std::to_string(r.users);
    out += ',';
    out += dataset;
    out += ',';
    out += algorithm;
    out += ',';
    out += rep;
    out += '\n';
  }
  return out;
}

void write_score_table(const std::filesystem::path& path, const StrategyScoreTable& table) {
  write_text_file(path, score_table_csv(table));
}

StrategyScoreTable parse_score_table(std::string_view csv, std::string_view source) {
  std::istringstream in{std::string(csv)};
  std::string line;
  std::size_t line_no = 0;
  StrategyScoreTable table;
  std::vector<std::vector<std::uint8_t>> labels;
  std::vector<std::size_t> ids;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line_no == 1) {
      if (line != kHeader) throw InputError(std::string(source) + ": unexpected score table header");
      continue;
    }
    const auto f = parse_csv_line(line);
    if (f.size() != 10) {
      throw InputError(std::string(source) + ":" + std::to_string(line_no) + ": expected 10 fields");
    }
    StrategyRow row;
    ids.push_back(static_cast<std::size_t>(parse_int(f[0], "strategy_id")));
    auto& idx = labels.emplace_back();
    for (auto part : split_fields(f[1], "-")) {
      idx.push_back(static_cast<std::uint8_t>(parse_int(part, "strategy index")));
    }
    row.ndcg_val = parse_double(f[2], "ndcg_val");
    row.ndcg_test = parse_double(f[3], "ndcg_test");
    row.prec_val = parse_double(f[4], "prec_val");
    row.prec_test = parse_double(f[5], "prec_test");
    row.users = static_cast<std::size_t>(parse_int(f[6], "users"));
    if (table.rows.empty()) {
      table.key = {f[7], f[8], static_cast<int>(parse_int(f[9], "repetition"))};
    }
    table.rows.push_back(std::move(row));
  }
  if (table.rows.empty()) throw InputError(std::string(source) + ": empty score table");

  // K is the smallest depth whose combination count matches the row count
  table.n = labels.front().size();
  std::size_t K = table.n;
  while (binomial(K, table.n) < table.rows.size() && K < 64) ++K;
  if (binomial(K, table.n) != table.rows.size()) {
    throw InputError(std::string(source) + ": row count is not a binomial coefficient");
  }
  table.K = K;
  for (std::size_t s = 0; s < table.rows.size(); ++s) {
    auto& strategy = table.rows[s].strategy;
    strategy.indices = labels[s];
    strategy.id = strategy_rank(strategy.indices, K);
    if (strategy.id != ids[s] || strategy.id != s) {
      throw InputError(std::string(source) + ": strategy id does not match its indices");
    }
  }
  table.test_users = table.rows.front().users;
  table.validation_users = 0;  // not stored in the CSV
  return table;
}

StrategyScoreTable read_score_table(const std::filesystem::path& path) {
  return parse_score_table(read_text_file(path), path.string());
}

}  // namespace selbench::strategy
