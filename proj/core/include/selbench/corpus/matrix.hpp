#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "selbench/common.hpp"
#include "selbench/corpus/interactions.hpp"

namespace selbench::corpus {

/// Bijection between opaque identifiers and dense indices, in order of first
/// insertion.
class IdMap {
 public:
  std::uint32_t intern(const std::string& id);
  std::optional<std::uint32_t> find(const std::string& id) const;
  const std::string& id(std::uint32_t index) const { return ids_.at(index); }
  std::size_t size() const noexcept { return ids_.size(); }
  const std::vector<std::string>& ids() const noexcept { return ids_; }

 private:
  std::vector<std::string> ids_;
  std::unordered_map<std::string, std::uint32_t> index_;
};

struct IndexMaps {
  IdMap users;
  IdMap items;
};

/// Compressed sparse row pattern: strictly ascending column indices per row.
class SparsePattern {
 public:
  SparsePattern() = default;
  /// Rows must already be strictly ascending and within [0, n_cols).
  SparsePattern(std::size_t n_cols, const std::vector<std::vector<std::uint32_t>>& rows);

  std::size_t n_rows() const noexcept { return row_ptr_.empty() ? 0 : row_ptr_.size() - 1; }
  std::size_t n_cols() const noexcept { return n_cols_; }
  std::size_t nnz() const noexcept { return cols_.size(); }

  std::span<const std::uint32_t> row(std::size_t r) const {
    return {cols_.data() + row_ptr_[r], cols_.data() + row_ptr_[r + 1]};
  }
  std::size_t row_begin(std::size_t r) const { return row_ptr_[r]; }
  std::size_t row_size(std::size_t r) const { return row_ptr_[r + 1] - row_ptr_[r]; }
  bool contains(std::size_t r, std::uint32_t c) const;

  SparsePattern transposed() const;

  const std::vector<std::size_t>& row_ptr() const noexcept { return row_ptr_; }
  const std::vector<std::uint32_t>& cols() const noexcept { return cols_; }

  friend bool operator==(const SparsePattern&, const SparsePattern&) = default;

 private:
  std::size_t n_cols_ = 0;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<std::uint32_t> cols_;
};

/// Binary user x item matrix plus the identifier maps it was built with.
/// Splits of the same data share one IndexMaps instance.
class InteractionMatrix {
 public:
  InteractionMatrix() : maps_(std::make_shared<IndexMaps>()) {}
  InteractionMatrix(std::shared_ptr<const IndexMaps> maps, SparsePattern pattern);

  /// Assigns indices in order of first appearance. Records must already be
  /// deduplicated.
  static InteractionMatrix from_records(const std::vector<InteractionRecord>& records);
  /// Builds a matrix over existing maps; rows are sorted and checked.
  static InteractionMatrix from_rows(std::shared_ptr<const IndexMaps> maps,
                                     std::vector<std::vector<ItemIndex>> rows);

  std::size_t n_users() const noexcept { return pattern_.n_rows(); }
  std::size_t n_items() const noexcept { return pattern_.n_cols(); }
  std::size_t nnz() const noexcept { return pattern_.nnz(); }
  std::span<const ItemIndex> row(UserIndex u) const { return pattern_.row(u); }
  bool contains(UserIndex u, ItemIndex i) const { return pattern_.contains(u, i); }

  const SparsePattern& pattern() const noexcept { return pattern_; }
  const IndexMaps& maps() const noexcept { return *maps_; }
  std::shared_ptr<const IndexMaps> shared_maps() const noexcept { return maps_; }

  /// Records with opaque identifiers, row-major.
  std::vector<InteractionRecord> to_records() const;

 private:
  std::shared_ptr<const IndexMaps> maps_;
  SparsePattern pattern_;
};

struct DatasetStats {
  std::size_t users = 0;
  std::size_t items = 0;
  std::size_t interactions = 0;
  double avg_per_user = 0.0;
  double avg_per_item = 0.0;
  double sparsity = 0.0;  // 1 - nnz / (users * items)

  friend bool operator==(const DatasetStats&, const DatasetStats&) = default;
};

DatasetStats compute_stats(const InteractionMatrix& matrix);

}  // namespace selbench::corpus
