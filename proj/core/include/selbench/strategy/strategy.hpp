#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "selbench/common.hpp"

namespace selbench::strategy {

/// A choice of n positions out of the top K of a ranked list. `id` is the
/// lexicographic rank of `indices` among all C(K, n) combinations, so id 0 is
/// {0, ..., n-1}: the conventional top-n evaluation.
struct SelectionStrategy {
  std::size_t id = 0;
  std::vector<std::uint8_t> indices;  // strictly ascending, each < K

  bool is_top_n() const noexcept { return id == 0; }
  /// "0-2-4-6-8"
  std::string label() const;

  friend bool operator==(const SelectionStrategy&, const SelectionStrategy&) = default;
};

std::uint64_t binomial(std::size_t n, std::size_t k);

/// All C(K, n) strategies in lexicographic order. Requires 1 <= n <= K <= 64.
std::vector<SelectionStrategy> enumerate_strategies(std::size_t K, std::size_t n);

/// Lexicographic rank of a sorted index set, and its inverse.
std::size_t strategy_rank(std::span<const std::uint8_t> indices, std::size_t K);
SelectionStrategy strategy_unrank(std::size_t id, std::size_t K, std::size_t n);

SelectionStrategy parse_strategy_label(std::string_view label, std::size_t K);

/// Items at the strategy's positions, in their original ranked order.
/// Throws ConfigError when `ranked` is shorter than K.
std::vector<ItemIndex> apply_strategy(std::span<const ItemIndex> ranked,
                                      const SelectionStrategy& s, std::size_t K);

}  // namespace selbench::strategy
