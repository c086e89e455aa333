#pragma once

#include <string_view>
#include <vector>

#include "selbench/corpus/interactions.hpp"

namespace selbench::corpus {

enum class FeedbackType { implicit_feedback, explicit_feedback };

std::string_view to_string(FeedbackType type) noexcept;
FeedbackType feedback_from_string(std::string_view text);

struct BinarizeOptions {
  double threshold_fraction = 0.6;
  double scale_min = 1.0;
  double scale_max = 5.0;
  /// Keep rating >= fraction * max. When false the comparison is strict.
  bool inclusive = true;
};

/// Keeps ratings that clear fraction * scale_max and drops the rating field.
/// Throws InputError for a record without a rating or outside the scale.
std::vector<InteractionRecord> binarize(const std::vector<InteractionRecord>& records,
                                        const BinarizeOptions& options);

/// binarize() for explicit data; implicit data is returned unchanged.
std::vector<InteractionRecord> prepare_feedback(std::vector<InteractionRecord> records,
                                                FeedbackType type,
                                                const BinarizeOptions& options);

struct KCoreResult {
  std::vector<InteractionRecord> records;  // input order preserved
  std::size_t removed_users = 0;
  std::size_t removed_items = 0;
  /// Nothing survived. Reported, not thrown.
  bool empty = false;
};

/// Maximal subgraph in which every user and every item has at least k
/// interactions. Records must be deduplicated.
KCoreResult k_core(const std::vector<InteractionRecord>& records, std::size_t k);

}  // namespace selbench::corpus
