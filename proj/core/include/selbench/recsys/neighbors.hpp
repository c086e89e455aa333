#pragma once

#include <vector>

#include "selbench/corpus/matrix.hpp"
#include "selbench/recsys/config.hpp"

namespace selbench::recsys {

/// User x item matrix with one value per stored interaction.
struct WeightedMatrix {
  corpus::SparsePattern pattern;
  std::vector<double> values;  // aligned with pattern.cols()
};

/// Reweights the binary training matrix. With N users, df(i) the number of
/// users holding item i, len(u) the row length and avg_len its mean:
///
///   none   1
///   tfidf  log(1 + N / df(i))
///   bm25   idf(i) * (k1 + 1) / (1 + k1 * (1 - b + b * len(u) / avg_len)),
///          idf(i) = log((N - df(i) + 0.5) / (df(i) + 0.5) + 1)
WeightedMatrix weight_matrix(const corpus::InteractionMatrix& train, Weighting scheme,
                             double k1 = 1.2, double b = 0.75);

enum class KnnAxis { item, user };

struct Neighbor {
  std::uint32_t index = 0;
  double similarity = 0.0;

  friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

/// Per-entity neighbour lists sorted by similarity descending, ties by index.
using SimilarityTable = std::vector<std::vector<Neighbor>>;

/// Cosine similarity between item columns (or user rows) of `weighted`,
/// keeping the `truncation` most similar entities with positive similarity.
/// Self-similarity is excluded; all-zero vectors get empty lists.
SimilarityTable knn_similarity(const WeightedMatrix& weighted, KnnAxis axis,
                               std::size_t truncation);

}  // namespace selbench::recsys
