#pragma once

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "selbench/common.hpp"
#include "selbench/corpus/matrix.hpp"

namespace selbench::testing {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("selbench-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  std::filesystem::path path_;
};

/// Users "u0".."u{n-1}", items "i0".."i{m-1}", each cell present with
/// probability `density`. Every user gets at least `min_per_user` items.
inline corpus::InteractionMatrix random_matrix(Rng& rng, std::size_t n_users, std::size_t n_items,
                                               double density, std::size_t min_per_user = 1) {
  auto maps = std::make_shared<corpus::IndexMaps>();
  for (std::size_t u = 0; u < n_users; ++u) maps->users.intern("u" + std::to_string(u));
  for (std::size_t i = 0; i < n_items; ++i) maps->items.intern("i" + std::to_string(i));
  std::vector<std::vector<ItemIndex>> rows(n_users);
  for (std::size_t u = 0; u < n_users; ++u) {
    for (std::size_t i = 0; i < n_items; ++i) {
      if (rng.uniform01() < density) rows[u].push_back(static_cast<ItemIndex>(i));
    }
    while (rows[u].size() < min_per_user) {
      const auto i = static_cast<ItemIndex>(rng.below(n_items));
      if (std::find(rows[u].begin(), rows[u].end(), i) == rows[u].end()) rows[u].push_back(i);
    }
  }
  return corpus::InteractionMatrix::from_rows(maps, std::move(rows));
}

}  // namespace selbench::testing
