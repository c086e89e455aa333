#include "selbench/strategy/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace selbench::strategy {

double position_discount(std::size_t position) {
  return 1.0 / std::log2(static_cast<double>(position) + 1.0);
}

double ndcg_from_hits(std::span<const char> hits, std::size_t n_relevant) {
  if (n_relevant == 0) return 0.0;
  double dcg = 0.0;
  for (std::size_t pos = 1; pos <= hits.size(); ++pos) {
    if (hits[pos - 1]) dcg += position_discount(pos);
  }
  double idcg = 0.0;
  const std::size_t ideal = std::min(hits.size(), n_relevant);
  for (std::size_t pos = 1; pos <= ideal; ++pos) idcg += position_discount(pos);
  return dcg / idcg;
}

double ndcg_at_n(std::span<const ItemIndex> selected, std::span<const ItemIndex> relevant,
                 std::size_t n) {
  if (selected.size() != n) throw ConfigError("ndcg_at_n: selection size must equal n");
  std::vector<char> hits(n);
  for (std::size_t k = 0; k < n; ++k) {
    hits[k] = std::binary_search(relevant.begin(), relevant.end(), selected[k]) ? 1 : 0;
  }
  return ndcg_from_hits(hits, relevant.size());
}

double precision_at_n(std::span<const ItemIndex> selected, std::span<const ItemIndex> relevant,
                      std::size_t n) {
  if (selected.size() != n) throw ConfigError("precision_at_n: selection size must equal n");
  std::size_t hits = 0;
  for (auto item : selected) {
    if (std::binary_search(relevant.begin(), relevant.end(), item)) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(n);
}

}  // namespace selbench::strategy
