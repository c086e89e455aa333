#include "selbench/corpus/matrix.hpp"

#include <algorithm>

namespace selbench::corpus {

std::uint32_t IdMap::intern(const std::string& id) {
  auto [it, inserted] = index_.try_emplace(id, static_cast<std::uint32_t>(ids_.size()));
  if (inserted) ids_.push_back(id);
  return it->second;
}

std::optional<std::uint32_t> IdMap::find(const std::string& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

SparsePattern::SparsePattern(std::size_t n_cols,
                             const std::vector<std::vector<std::uint32_t>>& rows)
    : n_cols_(n_cols) {
  row_ptr_.clear();
  row_ptr_.reserve(rows.size() + 1);
  row_ptr_.push_back(0);
  std::size_t total = 0;
  for (const auto& r : rows) total += r.size();
  cols_.reserve(total);
  for (const auto& r : rows) {
    for (std::size_t k = 0; k < r.size(); ++k) {
      if (r[k] >= n_cols) throw ConfigError("SparsePattern: column index out of range");
      if (k > 0 && r[k] <= r[k - 1]) {
        throw ConfigError("SparsePattern: row not strictly ascending");
      }
    }
    cols_.insert(cols_.end(), r.begin(), r.end());
    row_ptr_.push_back(cols_.size());
  }
}

bool SparsePattern::contains(std::size_t r, std::uint32_t c) const {
  auto row_span = row(r);
  return std::binary_search(row_span.begin(), row_span.end(), c);
}

SparsePattern SparsePattern::transposed() const {
  std::vector<std::vector<std::uint32_t>> rows(n_cols_);
  for (std::size_t r = 0; r < n_rows(); ++r) {
    for (auto c : row(r)) rows[c].push_back(static_cast<std::uint32_t>(r));
  }
  return SparsePattern(n_rows(), rows);
}

InteractionMatrix::InteractionMatrix(std::shared_ptr<const IndexMaps> maps, SparsePattern pattern)
    : maps_(std::move(maps)), pattern_(std::move(pattern)) {
  if (pattern_.n_rows() != maps_->users.size() || pattern_.n_cols() != maps_->items.size()) {
    throw ConfigError("InteractionMatrix: pattern shape does not match index maps");
  }
}

InteractionMatrix InteractionMatrix::from_records(const std::vector<InteractionRecord>& records) {
  auto maps = std::make_shared<IndexMaps>();
  std::vector<std::vector<ItemIndex>> rows;
  for (const auto& rec : records) {
    const auto u = maps->users.intern(rec.user);
    const auto i = maps->items.intern(rec.item);
    if (u >= rows.size()) rows.resize(u + 1);
    rows[u].push_back(i);
  }
  return from_rows(std::move(maps), std::move(rows));
}

InteractionMatrix InteractionMatrix::from_rows(std::shared_ptr<const IndexMaps> maps,
                                               std::vector<std::vector<ItemIndex>> rows) {
  rows.resize(maps->users.size());
  for (auto& r : rows) {
    std::sort(r.begin(), r.end());
    if (std::adjacent_find(r.begin(), r.end()) != r.end()) {
      throw ConfigError("InteractionMatrix: duplicate (user, item) pair");
    }
  }
  SparsePattern pattern(maps->items.size(), rows);
  return InteractionMatrix(std::move(maps), std::move(pattern));
}

std::vector<InteractionRecord> InteractionMatrix::to_records() const {
  std::vector<InteractionRecord> out;
  out.reserve(nnz());
  for (UserIndex u = 0; u < n_users(); ++u) {
    for (auto i : row(u)) out.push_back({maps_->users.id(u), maps_->items.id(i), {}, {}});
  }
  return out;
}

DatasetStats compute_stats(const InteractionMatrix& matrix) {
  DatasetStats s;
  s.users = matrix.n_users();
  s.items = matrix.n_items();
  s.interactions = matrix.nnz();
  if (s.users > 0) s.avg_per_user = static_cast<double>(s.interactions) / s.users;
  if (s.items > 0) s.avg_per_item = static_cast<double>(s.interactions) / s.items;
  if (s.users > 0 && s.items > 0) {
    s.sparsity = 1.0 - static_cast<double>(s.interactions) /
                           (static_cast<double>(s.users) * static_cast<double>(s.items));
  }
  return s;
}

}  // namespace selbench::corpus
