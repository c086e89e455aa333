#pragma once

#include <filesystem>

#include <nlohmann/json.hpp>

#include "selbench/corpus/matrix.hpp"
#include "selbench/corpus/split.hpp"

namespace selbench::corpus {

/// Canonical dump: `user,item` CSV (header included) in row-major order.
void write_canonical_csv(const std::filesystem::path& path, const InteractionMatrix& matrix);
InteractionMatrix read_canonical_csv(const std::filesystem::path& path);

/// Sidecar manifest written next to a canonical dump.
nlohmann::json stats_to_json(const DatasetStats& stats);
DatasetStats stats_from_json(const nlohmann::json& j);

/// Split assignment as `user,item,set` with set in {train,validation,test}.
void write_split_csv(const std::filesystem::path& path, const FoldSplit& split);
FoldSplit read_split_csv(const std::filesystem::path& path, const InteractionMatrix& full,
                         std::uint64_t seed, int repetition);

}  // namespace selbench::corpus
