#include "selbench/corpus/split.hpp"

#include <cmath>
#include <string>

namespace selbench::corpus {

SplitSizes split_sizes(std::size_t m, const SplitRatios& ratios) {
  if (m < 3) {
    throw InputError("split: user with " + std::to_string(m) +
                     " interactions cannot fill train, validation and test");
  }
  const auto portion = [m](double ratio) {
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(ratio * static_cast<double>(m))));
  };
  SplitSizes s;
  s.test = portion(ratios.test);
  s.validation = portion(ratios.validation);
  if (s.test + s.validation >= m) {
    throw InputError("split: ratios leave no training interactions for a user with " +
                     std::to_string(m) + " interactions");
  }
  s.train = m - s.test - s.validation;
  return s;
}

FoldSplit split_per_user(const InteractionMatrix& matrix, const SplitRatios& ratios,
                         std::uint64_t seed, int repetition) {
  if (repetition < 0 || repetition >= kMaxRepetitions) {
    throw ConfigError("split: repetition must lie in [0, " + std::to_string(kMaxRepetitions - 1) +
                      "]");
  }
  if (ratios.train <= 0 || ratios.validation <= 0 || ratios.test <= 0) {
    throw ConfigError("split: ratios must be positive");
  }
  const double total = ratios.train + ratios.validation + ratios.test;
  if (std::abs(total - 1.0) > 1e-9) throw ConfigError("split: ratios must sum to 1");

  const std::size_t n_users = matrix.n_users();
  std::vector<std::vector<ItemIndex>> train(n_users), validation(n_users), test(n_users);
  std::vector<ItemIndex> buffer;
  for (UserIndex u = 0; u < n_users; ++u) {
    const auto row = matrix.row(u);
    const auto sizes = split_sizes(row.size(), ratios);
    buffer.assign(row.begin(), row.end());
    Rng rng(seed, "split", {static_cast<std::uint64_t>(repetition), u});
    rng.shuffle(std::span<ItemIndex>(buffer));
    auto cursor = buffer.begin();
    test[u].assign(cursor, cursor + static_cast<std::ptrdiff_t>(sizes.test));
    cursor += static_cast<std::ptrdiff_t>(sizes.test);
    validation[u].assign(cursor, cursor + static_cast<std::ptrdiff_t>(sizes.validation));
    cursor += static_cast<std::ptrdiff_t>(sizes.validation);
    train[u].assign(cursor, buffer.end());
  }

  FoldSplit split;
  split.repetition = repetition;
  split.seed = seed;
  const auto maps = matrix.shared_maps();
  split.train = InteractionMatrix::from_rows(maps, std::move(train));
  split.validation = InteractionMatrix::from_rows(maps, std::move(validation));
  split.test = InteractionMatrix::from_rows(maps, std::move(test));
  return split;
}

}  // namespace selbench::corpus
