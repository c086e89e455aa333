#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/special_functions/gamma.hpp>

#include "selbench/common.hpp"
#include "selbench/stats/tests.hpp"

namespace selbench::stats {

std::vector<double> rank_descending(std::span<const double> values) {
  const std::size_t k = values.size();
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
  std::vector<double> ranks(k);
  std::size_t start = 0;
  while (start < k) {
    std::size_t end = start + 1;
    while (end < k && values[order[end]] == values[order[start]]) ++end;
    // positions start..end-1 share ranks start+1..end
    const double avg = (static_cast<double>(start + 1) + static_cast<double>(end)) / 2.0;
    for (std::size_t p = start; p < end; ++p) ranks[order[p]] = avg;
    start = end;
  }
  return ranks;
}

FriedmanResult friedman(const Eigen::MatrixXd& scores) {
  const auto N = static_cast<std::size_t>(scores.rows());
  const auto k = static_cast<std::size_t>(scores.cols());
  if (N < 2) throw ConfigError("friedman: need at least 2 blocks");
  if (k < 2) throw ConfigError("friedman: need at least 2 treatments");
  if (!scores.allFinite()) throw ConfigError("friedman: missing or non-finite cells");

  FriedmanResult out;
  out.N = N;
  out.k = k;
  std::vector<double> rank_sums(k, 0.0);
  double tie_term = 0.0;
  std::vector<double> row(k);
  for (std::size_t b = 0; b < N; ++b) {
    for (std::size_t j = 0; j < k; ++j) row[j] = scores(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(j));
    const auto ranks = rank_descending(row);
    for (std::size_t j = 0; j < k; ++j) rank_sums[j] += ranks[j];
    std::sort(row.begin(), row.end());
    for (std::size_t s = 0; s < k;) {
      std::size_t e = s + 1;
      while (e < k && row[e] == row[s]) ++e;
      const double t = static_cast<double>(e - s);
      tie_term += t * t * t - t;
      s = e;
    }
  }

  const double dn = static_cast<double>(N);
  const double dk = static_cast<double>(k);
  out.mean_ranks.resize(k);
  double sum_sq = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    out.mean_ranks[j] = rank_sums[j] / dn;
    sum_sq += rank_sums[j] * rank_sums[j];
  }
  out.tie_correction = 1.0 - tie_term / (dn * dk * (dk * dk - 1.0));
  if (out.tie_correction <= 1e-12) {
    out.statistic = 0.0;
    out.p_value = 1.0;
    return out;
  }
  const double uncorrected = 12.0 / (dn * dk * (dk + 1.0)) * sum_sq - 3.0 * dn * (dk + 1.0);
  out.statistic = std::max(0.0, uncorrected / out.tie_correction);
  out.p_value = boost::math::gamma_q((dk - 1.0) / 2.0, out.statistic / 2.0);
  return out;
}

}  // namespace selbench::stats
