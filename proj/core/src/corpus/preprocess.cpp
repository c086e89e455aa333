#include "selbench/corpus/preprocess.hpp"

#include <cmath>
#include <deque>
#include <string>
#include <unordered_map>

#include "selbench/common.hpp"

namespace selbench::corpus {

std::string_view to_string(FeedbackType type) noexcept {
  return type == FeedbackType::implicit_feedback ? "implicit" : "explicit";
}

FeedbackType feedback_from_string(std::string_view text) {
  if (text == "implicit") return FeedbackType::implicit_feedback;
  if (text == "explicit") return FeedbackType::explicit_feedback;
  throw ConfigError("unknown feedback type '" + std::string(text) + "'");
}

std::vector<InteractionRecord> binarize(const std::vector<InteractionRecord>& records,
                                        const BinarizeOptions& options) {
  if (!(options.threshold_fraction > 0.0 && options.threshold_fraction <= 1.0)) {
    throw ConfigError("binarize: threshold_fraction must lie in (0, 1]");
  }
  if (!(options.scale_max > options.scale_min)) {
    throw ConfigError("binarize: rating scale must have max > min");
  }
  const double threshold = options.threshold_fraction * options.scale_max;
  // 0.6 * 5 is not exactly 3 in binary; compare with a scale-relative slack
  const double slack = 1e-9 * std::abs(options.scale_max);

  std::vector<InteractionRecord> out;
  out.reserve(records.size());
  for (const auto& rec : records) {
    if (!rec.rating) {
      throw InputError("binarize: record (" + rec.user + ", " + rec.item + ") has no rating");
    }
    const double r = *rec.rating;
    if (r < options.scale_min - slack || r > options.scale_max + slack) {
      throw InputError("binarize: rating " + format_double(r) + " outside scale [" +
                       format_double(options.scale_min) + ", " +
                       format_double(options.scale_max) + "]");
    }
    const bool keep = options.inclusive ? r >= threshold - slack : r > threshold + slack;
    if (keep) out.push_back({rec.user, rec.item, std::nullopt, rec.timestamp});
  }
  return out;
}

std::vector<InteractionRecord> prepare_feedback(std::vector<InteractionRecord> records,
                                                FeedbackType type,
                                                const BinarizeOptions& options) {
  if (type == FeedbackType::implicit_feedback) return records;
  return binarize(records, options);
}

KCoreResult k_core(const std::vector<InteractionRecord>& records, std::size_t k) {
  if (k < 1) throw ConfigError("k_core: k must be >= 1");

  std::unordered_map<std::string, std::uint32_t> user_ix, item_ix;
  std::vector<std::uint32_t> rec_user(records.size()), rec_item(records.size());
  for (std::size_t r = 0; r < records.size(); ++r) {
    rec_user[r] = user_ix.try_emplace(records[r].user, user_ix.size()).first->second;
    rec_item[r] = item_ix.try_emplace(records[r].item, item_ix.size()).first->second;
  }
  const std::size_t n_users = user_ix.size();
  const std::size_t n_items = item_ix.size();

  std::vector<std::vector<std::size_t>> user_recs(n_users), item_recs(n_items);
  for (std::size_t r = 0; r < records.size(); ++r) {
    user_recs[rec_user[r]].push_back(r);
    item_recs[rec_item[r]].push_back(r);
  }
  std::vector<std::size_t> user_deg(n_users), item_deg(n_items);
  for (std::size_t u = 0; u < n_users; ++u) user_deg[u] = user_recs[u].size();
  for (std::size_t i = 0; i < n_items; ++i) item_deg[i] = item_recs[i].size();

  std::vector<char> record_alive(records.size(), 1);
  std::vector<char> user_alive(n_users, 1), item_alive(n_items, 1);

  // Node ids: users are [0, n_users), items are offset by n_users. The
  // maximal k-core is unique, so the peeling order does not matter.
  std::deque<std::size_t> queue;
  for (std::size_t u = 0; u < n_users; ++u) {
    if (user_deg[u] < k) queue.push_back(u);
  }
  for (std::size_t i = 0; i < n_items; ++i) {
    if (item_deg[i] < k) queue.push_back(n_users + i);
  }

  KCoreResult result;
  while (!queue.empty()) {
    const std::size_t node = queue.front();
    queue.pop_front();
    const bool is_user = node < n_users;
    const std::size_t id = is_user ? node : node - n_users;
    auto& alive = is_user ? user_alive[id] : item_alive[id];
    if (!alive) continue;
    alive = 0;
    ++(is_user ? result.removed_users : result.removed_items);
    for (auto r : is_user ? user_recs[id] : item_recs[id]) {
      if (!record_alive[r]) continue;
      record_alive[r] = 0;
      if (is_user) {
        const auto i = rec_item[r];
        if (item_alive[i] && item_deg[i]-- == k) queue.push_back(n_users + i);
      } else {
        const auto u = rec_user[r];
        if (user_alive[u] && user_deg[u]-- == k) queue.push_back(u);
      }
    }
  }

  for (std::size_t r = 0; r < records.size(); ++r) {
    if (record_alive[r]) result.records.push_back(records[r]);
  }
  result.empty = result.records.empty();
  return result;
}

}  // namespace selbench::corpus
