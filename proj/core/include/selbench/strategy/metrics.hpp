#pragma once

#include <span>

#include "selbench/common.hpp"

namespace selbench::strategy {

/// 1 / log2(position + 1) for a 1-based position.
double position_discount(std::size_t position);

/// Binary-relevance nDCG of an ordered selection:
///   DCG  = sum_{pos=1..n} [selected[pos] relevant] / log2(pos + 1)
///   IDCG = sum_{pos=1..min(n, |relevant|)} 1 / log2(pos + 1)
/// Returns 0 for an empty relevant set. `relevant` must be sorted ascending.
double ndcg_at_n(std::span<const ItemIndex> selected, std::span<const ItemIndex> relevant,
                 std::size_t n);

/// |selected ∩ relevant| / n. `relevant` must be sorted ascending.
double precision_at_n(std::span<const ItemIndex> selected, std::span<const ItemIndex> relevant,
                      std::size_t n);

/// nDCG from per-position hit flags in selection order; shared by the
/// per-list and table code paths so both produce identical bits.
double ndcg_from_hits(std::span<const char> hits, std::size_t n_relevant);

}  // namespace selbench::strategy
