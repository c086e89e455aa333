#pragma once

#include <cstdint>

#include "selbench/corpus/matrix.hpp"

namespace selbench::corpus {

inline constexpr int kMaxRepetitions = 5;

struct SplitRatios {
  double train = 0.6;
  double validation = 0.2;
  double test = 0.2;
};

struct SplitSizes {
  std::size_t train = 0;
  std::size_t validation = 0;
  std::size_t test = 0;
};

/// Per-user set sizes for m interactions: test and validation get
/// max(1, round(ratio * m)), train the remainder. Throws for m < 3.
SplitSizes split_sizes(std::size_t m, const SplitRatios& ratios);

struct FoldSplit {
  int repetition = 0;
  std::uint64_t seed = 0;
  InteractionMatrix train;
  InteractionMatrix validation;
  InteractionMatrix test;
};

/// Shuffles each user's interactions with a stream keyed by
/// (seed, repetition, user) and cuts it into test, validation and train.
FoldSplit split_per_user(const InteractionMatrix& matrix, const SplitRatios& ratios,
                         std::uint64_t seed, int repetition);

}  // namespace selbench::corpus
