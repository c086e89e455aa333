#include "selbench/strategy/strategy.hpp"

#include <algorithm>

namespace selbench::strategy {

std::string SelectionStrategy::label() const {
  std::string out;
  for (std::size_t k = 0; k < indices.size(); ++k) {
    if (k > 0) out += '-';
    out += std::to_string(indices[k]);
  }
  return out;
}

std::uint64_t binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  __extension__ unsigned __int128 r = 1;
  for (std::size_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return static_cast<std::uint64_t>(r);
}

namespace {

void check_shape(std::size_t K, std::size_t n) {
  if (n < 1) throw ConfigError("strategies: n must be >= 1");
  if (n > K) throw ConfigError("strategies: n must not exceed K");
  if (K > 64) throw ConfigError("strategies: K must be <= 64");
}

}  // namespace

std::vector<SelectionStrategy> enumerate_strategies(std::size_t K, std::size_t n) {
  check_shape(K, n);
  std::vector<SelectionStrategy> out;
  out.reserve(binomial(K, n));
  std::vector<std::uint8_t> idx(n);
  for (std::size_t k = 0; k < n; ++k) idx[k] = static_cast<std::uint8_t>(k);
  while (true) {
    out.push_back({out.size(), idx});
    // advance to the next combination in lexicographic order
    std::size_t pos = n;
    while (pos > 0 && idx[pos - 1] == K - n + pos - 1) --pos;
    if (pos == 0) break;
    ++idx[pos - 1];
    for (std::size_t k = pos; k < n; ++k) idx[k] = static_cast<std::uint8_t>(idx[k - 1] + 1);
  }
  return out;
}

std::size_t strategy_rank(std::span<const std::uint8_t> indices, std::size_t K) {
  const std::size_t n = indices.size();
  check_shape(K, n);
  std::size_t rank = 0;
  std::size_t prev = 0;  // smallest value allowed at this position
  for (std::size_t pos = 0; pos < n; ++pos) {
    if (indices[pos] >= K || indices[pos] < prev) {
      throw ConfigError("strategy_rank: indices must be strictly ascending and < K");
    }
    // combinations that place a smaller value at this position
    for (std::size_t v = prev; v < indices[pos]; ++v) rank += binomial(K - v - 1, n - pos - 1);
    prev = indices[pos] + 1u;
  }
  return rank;
}

SelectionStrategy strategy_unrank(std::size_t id, std::size_t K, std::size_t n) {
  check_shape(K, n);
  if (id >= binomial(K, n)) throw ConfigError("strategy_unrank: id out of range");
  SelectionStrategy s;
  s.id = id;
  std::size_t v = 0;
  for (std::size_t pos = 0; pos < n; ++pos) {
    while (true) {
      const auto block = binomial(K - v - 1, n - pos - 1);
      if (id < block) break;
      id -= block;
      ++v;
    }
    s.indices.push_back(static_cast<std::uint8_t>(v));
    ++v;
  }
  return s;
}

SelectionStrategy parse_strategy_label(std::string_view label, std::size_t K) {
  std::vector<std::uint8_t> idx;
  for (auto f : split_fields(label, "-")) {
    idx.push_back(static_cast<std::uint8_t>(parse_int(f, "strategy index")));
  }
  return {strategy_rank(idx, K), idx};
}

std::vector<ItemIndex> apply_strategy(std::span<const ItemIndex> ranked,
                                      const SelectionStrategy& s, std::size_t K) {
  if (ranked.size() < K) {
    throw ConfigError("apply_strategy: ranked list has " + std::to_string(ranked.size()) +
                      " items, need at least K=" + std::to_string(K));
  }
  std::vector<ItemIndex> out;
  out.reserve(s.indices.size());
  for (auto i : s.indices) {
    if (i >= K) throw ConfigError("apply_strategy: index outside top-K");
    out.push_back(ranked[i]);
  }
  return out;
}

}  // namespace selbench::strategy
