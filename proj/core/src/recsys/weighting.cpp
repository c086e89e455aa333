#include <cmath>

#include "selbench/recsys/neighbors.hpp"

namespace selbench::recsys {

WeightedMatrix weight_matrix(const corpus::InteractionMatrix& train, Weighting scheme, double k1,
                             double b) {
  WeightedMatrix out{train.pattern(), std::vector<double>(train.nnz(), 1.0)};
  if (scheme == Weighting::none) return out;

  const auto& pattern = train.pattern();
  const double n_users = static_cast<double>(pattern.n_rows());
  std::vector<double> df(pattern.n_cols(), 0.0);
  for (auto c : pattern.cols()) df[c] += 1.0;

  if (scheme == Weighting::tfidf) {
    for (std::size_t k = 0; k < out.values.size(); ++k) {
      out.values[k] = std::log(1.0 + n_users / df[pattern.cols()[k]]);
    }
    return out;
  }

  if (!(k1 > 0.0)) throw ConfigError("bm25: k1 must be positive");
  if (!(b >= 0.0 && b <= 1.0)) throw ConfigError("bm25: b must lie in [0, 1]");
  std::vector<double> idf(pattern.n_cols());
  for (std::size_t i = 0; i < idf.size(); ++i) {
    idf[i] = std::log((n_users - df[i] + 0.5) / (df[i] + 0.5) + 1.0);
  }
  const double avg_len = n_users > 0 ? static_cast<double>(pattern.nnz()) / n_users : 0.0;
  for (std::size_t u = 0; u < pattern.n_rows(); ++u) {
    const double len = static_cast<double>(pattern.row_size(u));
    const double norm = avg_len > 0 ? 1.0 - b + b * len / avg_len : 1.0;
    const double tf_part = (k1 + 1.0) / (1.0 + k1 * norm);
    for (std::size_t k = pattern.row_begin(u); k < pattern.row_begin(u) + pattern.row_size(u);
         ++k) {
      out.values[k] = idf[pattern.cols()[k]] * tf_part;
    }
  }
  return out;
}

}  // namespace selbench::recsys
