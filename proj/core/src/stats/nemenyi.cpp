#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>

#include "selbench/common.hpp"
#include "selbench/stats/tests.hpp"

namespace selbench::stats {

namespace {

double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI); }
double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

}  // namespace

double studentized_range_cdf(double q, std::size_t k) {
  if (k < 2) throw ConfigError("studentized_range_cdf: k must be >= 2");
  if (q <= 0.0) return 0.0;
  const double power = static_cast<double>(k - 1);
  auto integrand = [&](double z) {
    const double inner = normal_cdf(z) - normal_cdf(z - q);
    return inner <= 0.0 ? 0.0 : normal_pdf(z) * std::pow(inner, power);
  };
  // the density is negligible outside [-9, 9 + q]
  double error = 0.0;
  const double value = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      integrand, -9.0, 9.0 + q, 20, 1e-14, &error);
  return std::min(1.0, static_cast<double>(k) * value);
}

double studentized_range_quantile(std::size_t k, double alpha) {
  if (k < 2) throw ConfigError("studentized_range_quantile: k must be >= 2");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("studentized_range_quantile: bad alpha");
  const double target = 1.0 - alpha;
  auto f = [&](double q) { return studentized_range_cdf(q, k) - target; };
  double low = 0.0;
  double high = 4.0;
  while (f(high) < 0.0) {
    low = high;
    high *= 2.0;
    if (high > 1e3) throw NumericalError("studentized_range_quantile: no bracket found");
  }
  std::uintmax_t iterations = 200;
  const auto [a, b] = boost::math::tools::toms748_solve(
      f, low, high, boost::math::tools::eps_tolerance<double>(48), iterations);
  if (iterations >= 200) throw NumericalError("studentized_range_quantile: solver did not converge");
  return 0.5 * (a + b);
}

NemenyiResult nemenyi_cd(std::size_t k, std::size_t N, double alpha) {
  if (k < 2) throw ConfigError("nemenyi: k must be >= 2");
  if (N < 2) throw ConfigError("nemenyi: N must be >= 2");
  if (!(alpha > 0.0 && alpha <= 0.2)) throw ConfigError("nemenyi: alpha must lie in (0, 0.2]");
  NemenyiResult r;
  r.alpha = alpha;
  r.q_alpha = studentized_range_quantile(k, alpha) / std::sqrt(2.0);
  const double dk = static_cast<double>(k);
  r.critical_difference = r.q_alpha * std::sqrt(dk * (dk + 1.0) / (6.0 * static_cast<double>(N)));
  return r;
}

NemenyiResult nemenyi(const FriedmanResult& friedman, double alpha) {
  auto r = nemenyi_cd(friedman.k, friedman.N, alpha);
  r.not_different_with_best = not_different_fraction(friedman.mean_ranks, r.critical_difference);
  return r;
}

double not_different_fraction(std::span<const double> mean_ranks, double critical_difference) {
  if (mean_ranks.empty()) throw ConfigError("not_different_fraction: no treatments");
  const double best = *std::min_element(mean_ranks.begin(), mean_ranks.end());
  const auto within = std::count_if(mean_ranks.begin(), mean_ranks.end(), [&](double r) {
    return r <= best + critical_difference;
  });
  return static_cast<double>(within) / static_cast<double>(mean_ranks.size());
}

}  // namespace selbench::stats
