#pragma once

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace selbench::stats {

struct FriedmanResult {
  double statistic = 0.0;  // chi-square with k - 1 degrees of freedom
  double p_value = 1.0;
  std::size_t k = 0;       // treatments
  std::size_t N = 0;       // blocks
  std::vector<double> mean_ranks;  // rank 1 = highest score
  double tie_correction = 1.0;
};

/// Within-block average ranks (higher score = better = lower rank), then
///   chi2 = (12 / (N k (k+1)) sum_j R_j^2 - 3 N (k+1)) / C,
///   C    = 1 - sum over tie groups (t^3 - t) / (N k (k^2 - 1)),
/// with R_j the rank sum of treatment j. When every block is fully tied the
/// statistic is 0 and p = 1. Rows are blocks, columns treatments.
FriedmanResult friedman(const Eigen::MatrixXd& scores);

/// Average ranks of one block, 1 = largest value.
std::vector<double> rank_descending(std::span<const double> values);

/// Upper quantile of the studentised range with infinite degrees of freedom
/// for k groups, obtained by integrating
///   P(Q <= q) = k * int phi(z) (Phi(z) - Phi(z - q))^(k-1) dz
/// and solving P(Q <= q) = 1 - alpha.
double studentized_range_quantile(std::size_t k, double alpha);
double studentized_range_cdf(double q, std::size_t k);

struct NemenyiResult {
  double alpha = 0.05;
  double q_alpha = 0.0;  // studentised range quantile / sqrt(2)
  double critical_difference = 0.0;
  std::optional<double> not_different_with_best;
};

/// CD = q_alpha * sqrt(k (k + 1) / (6 N)). Requires k >= 2, N >= 2 and
/// alpha in (0, 0.2].
NemenyiResult nemenyi_cd(std::size_t k, std::size_t N, double alpha);

/// nemenyi_cd() plus the share of treatments within CD of the best mean rank.
NemenyiResult nemenyi(const FriedmanResult& friedman, double alpha);

/// Share of treatments whose mean rank is <= best (lowest) mean rank + CD.
double not_different_fraction(std::span<const double> mean_ranks, double critical_difference);

struct CorrelationResult {
  std::optional<double> pearson_r;  // unset when either side has zero variance
  std::size_t n = 0;
};

/// Product-moment correlation. Requires equal lengths >= 3.
CorrelationResult pearson(std::span<const double> x, std::span<const double> y);

}  // namespace selbench::stats
