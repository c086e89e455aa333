#include <algorithm>
#include <cmath>

#include "selbench/common.hpp"
#include "selbench/stats/tests.hpp"

namespace selbench::stats {

CorrelationResult pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ConfigError("pearson: length mismatch");
  if (x.size() < 3) throw ConfigError("pearson: need at least 3 samples");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  CorrelationResult out;
  out.n = x.size();
  if (sxx == 0.0 || syy == 0.0) return out;
  out.pearson_r = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
  return out;
}

}  // namespace selbench::stats
