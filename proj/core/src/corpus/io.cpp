#include "selbench/corpus/io.hpp"

#include <fstream>
#include <sstream>

namespace selbench::corpus {

void write_canonical_csv(const std::filesystem::path& path, const InteractionMatrix& matrix) {
  std::string out = "user,item\n";
  const auto& maps = matrix.maps();
  for (UserIndex u = 0; u < matrix.n_users(); ++u) {
    const auto& uid = csv_escape(maps.users.id(u));
    for (auto i : matrix.row(u)) {
      out += uid;
      out += ',';
      out += csv_escape(maps.items.id(i));
      out += '\n';
    }
  }
  write_text_file(path, out);
}

InteractionMatrix read_canonical_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  std::string line;
  std::size_t line_no = 0;
  std::vector<InteractionRecord> records;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    auto fields = parse_csv_line(line);
    if (!header_seen) {
      header_seen = true;
      if (fields.size() < 2 || fields[0] != "user" || fields[1] != "item") {
        throw InputError(path.string() + ": expected header 'user,item'");
      }
      continue;
    }
    if (fields.size() != 2) {
      throw InputError(path.string() + ":" + std::to_string(line_no) + ": malformed row");
    }
    records.push_back({std::move(fields[0]), std::move(fields[1]), {}, {}});
  }
  if (records.empty()) throw InputError(path.string() + ": empty result");
  return InteractionMatrix::from_records(records);
}

nlohmann::json stats_to_json(const DatasetStats& s) {
  return {{"users", s.users},
          {"items", s.items},
          {"interactions", s.interactions},
          {"avg_interactions_per_user", s.avg_per_user},
          {"avg_interactions_per_item", s.avg_per_item},
          {"sparsity", s.sparsity}};
}

DatasetStats stats_from_json(const nlohmann::json& j) {
  DatasetStats s;
  s.users = j.at("users").get<std::size_t>();
  s.items = j.at("items").get<std::size_t>();
  s.interactions = j.at("interactions").get<std::size_t>();
  s.avg_per_user = j.at("avg_interactions_per_user").get<double>();
  s.avg_per_item = j.at("avg_interactions_per_item").get<double>();
  s.sparsity = j.at("sparsity").get<double>();
  return s;
}

void write_split_csv(const std::filesystem::path& path, const FoldSplit& split) {
  std::string out = "user,item,set\n";
  const auto& maps = split.train.maps();
  auto emit = [&](const InteractionMatrix& m, std::string_view set) {
    for (UserIndex u = 0; u < m.n_users(); ++u) {
      for (auto i : m.row(u)) {
        out += csv_escape(maps.users.id(u));
        out += ',';
        out += csv_escape(maps.items.id(i));
        out += ',';
        out += set;
        out += '\n';
      }
    }
  };
  emit(split.train, "train");
  emit(split.validation, "validation");
  emit(split.test, "test");
  write_text_file(path, out);
}

FoldSplit read_split_csv(const std::filesystem::path& path, const InteractionMatrix& full,
                         std::uint64_t seed, int repetition) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  const auto& maps = full.maps();
  std::vector<std::vector<ItemIndex>> rows[3];
  for (auto& r : rows) r.resize(full.n_users());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 || line.empty()) continue;
    auto fields = parse_csv_line(line);
    if (fields.size() != 3) {
      throw InputError(path.string() + ":" + std::to_string(line_no) + ": malformed row");
    }
    const auto u = maps.users.find(fields[0]);
    const auto i = maps.items.find(fields[1]);
    if (!u || !i) {
      throw InputError(path.string() + ":" + std::to_string(line_no) + ": unknown identifier");
    }
    int set = fields[2] == "train" ? 0 : fields[2] == "validation" ? 1 : fields[2] == "test" ? 2 : -1;
    if (set < 0) throw InputError(path.string() + ":" + std::to_string(line_no) + ": bad set");
    rows[set][*u].push_back(*i);
  }
  FoldSplit split;
  split.seed = seed;
  split.repetition = repetition;
  split.train = InteractionMatrix::from_rows(full.shared_maps(), std::move(rows[0]));
  split.validation = InteractionMatrix::from_rows(full.shared_maps(), std::move(rows[1]));
  split.test = InteractionMatrix::from_rows(full.shared_maps(), std::move(rows[2]));
  return split;
}

}  // namespace selbench::corpus
