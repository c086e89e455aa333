#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace selbench::pipeline {

/// SHA-256 of the stage name and the canonical dump of its inputs.
std::string stage_key(std::string_view stage, const nlohmann::json& inputs);

/// A stage directory is reusable when its `.key` file holds the expected key
/// and every listed output exists. The key is written last, so an interrupted
/// stage is recomputed.
class StageCache {
 public:
  explicit StageCache(std::filesystem::path dir) : dir_(std::move(dir)) {}

  const std::filesystem::path& dir() const noexcept { return dir_; }
  bool fresh(const std::string& key, const std::vector<std::string>& outputs) const;
  void commit(const std::string& key) const;
  void invalidate() const;

 private:
  std::filesystem::path key_file() const { return dir_ / ".key"; }
  std::filesystem::path dir_;
};

}  // namespace selbench::pipeline
