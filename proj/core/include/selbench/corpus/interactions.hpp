#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace selbench::corpus {

/// One (user, item) event as read from a log. Identifiers are kept opaque.
struct InteractionRecord {
  std::string user;
  std::string item;
  std::optional<double> rating;  // absent for implicit feedback
  std::optional<std::int64_t> timestamp;

  friend bool operator==(const InteractionRecord&, const InteractionRecord&) = default;
};

/// A column is addressed by zero-based position, or by header name when the
/// file has a header row.
using ColumnRef = std::variant<std::size_t, std::string>;

struct ColumnSchema {
  std::string delimiter = ",";
  bool header = false;
  ColumnRef user = std::size_t{0};
  ColumnRef item = std::size_t{1};
  std::optional<ColumnRef> rating;
  std::optional<ColumnRef> timestamp;

  /// `u.data`: tab-separated user, item, rating, timestamp; no header.
  static ColumnSchema movielens_100k();
  /// `ratings.dat`: "::"-separated user, item, rating, timestamp.
  static ColumnSchema movielens_1m();
  /// Canonical dump: `user,item` with header.
  static ColumnSchema canonical();
};

struct LoadReport {
  std::vector<InteractionRecord> records;
  std::size_t rows_read = 0;
  std::size_t duplicates_merged = 0;
};

/// Reads a delimited interaction log and deduplicates it.
///
/// Blank lines are skipped. Malformed rows raise InputError naming the source
/// and line number; an input with no data rows raises "empty result".
LoadReport load_interactions(const std::filesystem::path& path, const ColumnSchema& schema);
LoadReport parse_interactions(std::istream& in, const ColumnSchema& schema,
                              const std::string& source_name);

/// Collapses repeated (user, item) pairs in first-appearance order. The
/// surviving record has the highest rating; equal ratings keep the latest
/// timestamp.
std::vector<InteractionRecord> deduplicate(std::vector<InteractionRecord> records,
                                           std::size_t* merged = nullptr);

}  // namespace selbench::corpus
