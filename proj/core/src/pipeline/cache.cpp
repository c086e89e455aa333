#include "selbench/pipeline/cache.hpp"

#include "selbench/common.hpp"

namespace selbench::pipeline {

std::string stage_key(std::string_view stage, const nlohmann::json& inputs) {
  nlohmann::json j = {{"stage", stage}, {"version", std::string(version())}, {"inputs", inputs}};
  return sha256_hex(j.dump());
}

bool StageCache::fresh(const std::string& key, const std::vector<std::string>& outputs) const {
  std::error_code ec;
  if (!std::filesystem::exists(key_file(), ec)) return false;
  for (const auto& name : outputs) {
    if (!std::filesystem::exists(dir_ / name, ec)) return false;
  }
  try {
    return read_text_file(key_file()) == key;
  } catch (const InputError&) {
    return false;
  }
}

void StageCache::commit(const std::string& key) const { write_text_file(key_file(), key); }

void StageCache::invalidate() const {
  std::error_code ec;
  std::filesystem::remove(key_file(), ec);
}

}  // namespace selbench::pipeline
