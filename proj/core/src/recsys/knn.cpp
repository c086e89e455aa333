#include <algorithm>
#include <cmath>

#include "selbench/recsys/neighbors.hpp"

namespace selbench::recsys {

namespace {

struct Entry {
  std::uint32_t index;
  double weight;
};

using Lists = std::vector<std::vector<Entry>>;

// rows of the weighted matrix as (column, weight) and columns as (row, weight)
std::pair<Lists, Lists> row_and_column_lists(const WeightedMatrix& m) {
  const auto& p = m.pattern;
  Lists rows(p.n_rows()), cols(p.n_cols());
  for (std::size_t r = 0; r < p.n_rows(); ++r) {
    for (std::size_t k = p.row_begin(r); k < p.row_begin(r) + p.row_size(r); ++k) {
      const auto c = p.cols()[k];
      rows[r].push_back({c, m.values[k]});
      cols[c].push_back({static_cast<std::uint32_t>(r), m.values[k]});
    }
  }
  return {std::move(rows), std::move(cols)};
}

}  // namespace

SimilarityTable knn_similarity(const WeightedMatrix& weighted, KnnAxis axis,
                               std::size_t truncation) {
  if (truncation < 1) throw ConfigError("knn_similarity: truncation must be >= 1");
  if (weighted.values.size() != weighted.pattern.nnz()) {
    throw ConfigError("knn_similarity: values do not match pattern");
  }
  auto [rows, cols] = row_and_column_lists(weighted);
  // entity vectors over features, and the inverse lists feature -> entities
  const Lists& entities = axis == KnnAxis::item ? cols : rows;
  const Lists& features = axis == KnnAxis::item ? rows : cols;

  std::vector<double> norm(entities.size(), 0.0);
  for (std::size_t e = 0; e < entities.size(); ++e) {
    double s = 0.0;
    for (const auto& x : entities[e]) s += x.weight * x.weight;
    norm[e] = std::sqrt(s);
  }

  SimilarityTable table(entities.size());
  std::vector<double> dot(entities.size(), 0.0);
  std::vector<char> touched_flag(entities.size(), 0);
  std::vector<std::uint32_t> touched;
  std::vector<Neighbor> candidates;
  for (std::size_t a = 0; a < entities.size(); ++a) {
    if (norm[a] == 0.0) continue;
    touched.clear();
    for (const auto& fa : entities[a]) {
      for (const auto& eb : features[fa.index]) {
        if (eb.index == a) continue;
        if (!touched_flag[eb.index]) {
          touched_flag[eb.index] = 1;
          touched.push_back(eb.index);
        }
        dot[eb.index] += fa.weight * eb.weight;
      }
    }
    candidates.clear();
    for (auto b : touched) {
      const double sim = norm[b] > 0.0 ? dot[b] / (norm[a] * norm[b]) : 0.0;
      if (sim > 0.0) candidates.push_back({b, sim});
      dot[b] = 0.0;
      touched_flag[b] = 0;
    }
    const auto by_similarity = [](const Neighbor& x, const Neighbor& y) {
      return x.similarity != y.similarity ? x.similarity > y.similarity : x.index < y.index;
    };
    const std::size_t keep = std::min(truncation, candidates.size());
    std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(keep),
                      candidates.end(), by_similarity);
    table[a].assign(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(keep));
  }
  return table;
}

}  // namespace selbench::recsys
