#include "selbench/corpus/interactions.hpp"

#include <fstream>
#include <istream>
#include <map>
#include <unordered_map>

#include "selbench/common.hpp"

namespace selbench::corpus {

ColumnSchema ColumnSchema::movielens_100k() {
  ColumnSchema s;
  s.delimiter = "\t";
  s.header = false;
  s.user = std::size_t{0};
  s.item = std::size_t{1};
  s.rating = std::size_t{2};
  s.timestamp = std::size_t{3};
  return s;
}

ColumnSchema ColumnSchema::movielens_1m() {
  ColumnSchema s = movielens_100k();
  s.delimiter = "::";
  return s;
}

ColumnSchema ColumnSchema::canonical() {
  ColumnSchema s;
  s.delimiter = ",";
  s.header = true;
  s.user = std::string("user");
  s.item = std::string("item");
  return s;
}

namespace {

std::size_t resolve(const ColumnRef& ref, const std::vector<std::string>& header,
                    const std::string& source) {
  if (const auto* idx = std::get_if<std::size_t>(&ref)) return *idx;
  const auto& name = std::get<std::string>(ref);
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw InputError(source + ": column '" + name + "' not found in header");
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.remove_suffix(1);
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  return s;
}

}  // namespace

LoadReport parse_interactions(std::istream& in, const ColumnSchema& schema,
                              const std::string& source_name) {
  std::vector<std::string> header;
  bool named = std::holds_alternative<std::string>(schema.user) ||
               std::holds_alternative<std::string>(schema.item) ||
               (schema.rating && std::holds_alternative<std::string>(*schema.rating)) ||
               (schema.timestamp && std::holds_alternative<std::string>(*schema.timestamp));
  if (named && !schema.header) {
    throw ConfigError(source_name + ": named columns require a header row");
  }

  std::string line;
  std::size_t line_no = 0;
  if (schema.header) {
    while (std::getline(in, line)) {
      ++line_no;
      if (trim(line).empty()) continue;
      for (auto f : split_fields(trim(line), schema.delimiter)) header.emplace_back(trim(f));
      break;
    }
  }

  const std::size_t user_col = resolve(schema.user, header, source_name);
  const std::size_t item_col = resolve(schema.item, header, source_name);
  const std::optional<std::size_t> rating_col =
      schema.rating ? std::optional(resolve(*schema.rating, header, source_name)) : std::nullopt;
  const std::optional<std::size_t> ts_col =
      schema.timestamp ? std::optional(resolve(*schema.timestamp, header, source_name))
                       : std::nullopt;
  std::size_t needed = std::max(user_col, item_col);
  if (rating_col) needed = std::max(needed, *rating_col);
  if (ts_col) needed = std::max(needed, *ts_col);

  LoadReport report;
  while (std::getline(in, line)) {
    ++line_no;
    const auto text = trim(line);
    if (text.empty()) continue;
    const auto fields = split_fields(text, schema.delimiter);
    auto fail = [&](const std::string& why) -> InputError {
      return InputError(source_name + ":" + std::to_string(line_no) + ": malformed row (" +
                        why + ")");
    };
    if (fields.size() <= needed) {
      throw fail("expected at least " + std::to_string(needed + 1) + " fields, got " +
                 std::to_string(fields.size()));
    }
    InteractionRecord rec;
    rec.user = std::string(trim(fields[user_col]));
    rec.item = std::string(trim(fields[item_col]));
    if (rec.user.empty() || rec.item.empty()) throw fail("empty user or item");
    try {
      if (rating_col) rec.rating = parse_double(trim(fields[*rating_col]), "rating");
      if (ts_col) rec.timestamp = parse_int(trim(fields[*ts_col]), "timestamp");
    } catch (const InputError& e) {
      throw fail(e.what());
    }
    report.records.push_back(std::move(rec));
    ++report.rows_read;
  }
  if (in.bad()) throw InputError(source_name + ": read error");
  if (report.records.empty()) throw InputError(source_name + ": empty result");

  report.records = deduplicate(std::move(report.records), &report.duplicates_merged);
  return report;
}

LoadReport load_interactions(const std::filesystem::path& path, const ColumnSchema& schema) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  return parse_interactions(in, schema, path.string());
}

namespace {

// true when `candidate` should replace `kept`
bool preferred(const InteractionRecord& candidate, const InteractionRecord& kept) {
  const double cr = candidate.rating.value_or(0.0);
  const double kr = kept.rating.value_or(0.0);
  if (cr != kr) return cr > kr;
  const auto ct = candidate.timestamp.value_or(INT64_MIN);
  const auto kt = kept.timestamp.value_or(INT64_MIN);
  return ct > kt;
}

}  // namespace

std::vector<InteractionRecord> deduplicate(std::vector<InteractionRecord> records,
                                           std::size_t* merged) {
  std::unordered_map<std::string, std::unordered_map<std::string, std::size_t>> seen;
  std::vector<InteractionRecord> out;
  out.reserve(records.size());
  std::size_t dups = 0;
  for (auto& rec : records) {
    auto& per_user = seen[rec.user];
    auto [it, inserted] = per_user.try_emplace(rec.item, out.size());
    if (inserted) {
      out.push_back(std::move(rec));
    } else {
      ++dups;
      if (preferred(rec, out[it->second])) out[it->second] = std::move(rec);
    }
  }
  if (merged) *merged = dups;
  return out;
}

}  // namespace selbench::corpus
