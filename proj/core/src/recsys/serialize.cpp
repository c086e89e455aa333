#include "selbench/recsys/model.hpp"

namespace selbench::recsys {

namespace {

using nlohmann::json;

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(rows)}};
}

Eigen::MatrixXd matrix_from_json(const json& j) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const auto& data = j.at("data");
  if (static_cast<Eigen::Index>(data.size()) != rows) throw InputError("model: bad matrix rows");
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto& row = data[static_cast<std::size_t>(r)];
    if (static_cast<Eigen::Index>(row.size()) != cols) throw InputError("model: bad matrix cols");
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = row[static_cast<std::size_t>(c)].get<double>();
  }
  return m;
}

json pattern_to_json(const corpus::SparsePattern& p) {
  return {{"n_cols", p.n_cols()}, {"row_ptr", p.row_ptr()}, {"cols", p.cols()}};
}

corpus::SparsePattern pattern_from_json(const json& j) {
  const auto n_cols = j.at("n_cols").get<std::size_t>();
  const auto row_ptr = j.at("row_ptr").get<std::vector<std::size_t>>();
  const auto cols = j.at("cols").get<std::vector<std::uint32_t>>();
  if (row_ptr.empty() || row_ptr.back() != cols.size()) throw InputError("model: bad pattern");
  std::vector<std::vector<std::uint32_t>> rows(row_ptr.size() - 1);
  for (std::size_t r = 0; r + 1 < row_ptr.size(); ++r) {
    rows[r].assign(cols.begin() + static_cast<std::ptrdiff_t>(row_ptr[r]),
                   cols.begin() + static_cast<std::ptrdiff_t>(row_ptr[r + 1]));
  }
  return corpus::SparsePattern(n_cols, rows);
}

}  // namespace

json model_to_json(const ModelState& model) {
  json j = {{"format", std::string(kModelFormat)},
            {"algorithm", std::string(to_string(model.algorithm))},
            {"n_users", model.n_users},
            {"n_items", model.n_items}};
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, FactorModel>) {
          j["user_factors"] = matrix_to_json(s.user_factors);
          j["item_factors"] = matrix_to_json(s.item_factors);
        } else if constexpr (std::is_same_v<T, KnnModel>) {
          j["axis"] = s.axis == KnnAxis::item ? "item" : "user";
          j["normalize"] = s.normalize;
          json table = json::array();
          for (const auto& list : s.neighbors) {
            json entries = json::array();
            for (const auto& nb : list) entries.push_back({nb.index, nb.similarity});
            table.push_back(std::move(entries));
          }
          j["neighbors"] = std::move(table);
          j["train"] = pattern_to_json(s.train);
        } else if constexpr (std::is_same_v<T, PopularityModel>) {
          j["counts"] = s.counts;
        } else {
          j["seed"] = s.seed;
        }
      },
      model.state);
  return j;
}

ModelState model_from_json(const json& j) {
  if (j.value("format", std::string{}) != kModelFormat) {
    throw InputError("model: unsupported artifact format '" + j.value("format", std::string{}) +
                     "'");
  }
  ModelState m;
  m.algorithm = algorithm_from_string(j.at("algorithm").get<std::string>());
  m.n_users = j.at("n_users").get<std::size_t>();
  m.n_items = j.at("n_items").get<std::size_t>();
  switch (m.algorithm) {
    case Algorithm::als:
    case Algorithm::bpr: {
      FactorModel f{matrix_from_json(j.at("user_factors")), matrix_from_json(j.at("item_factors"))};
      check_finite(f, "model artifact");
      m.state = std::move(f);
      break;
    }
    case Algorithm::item_knn:
    case Algorithm::user_knn: {
      KnnModel k;
      k.axis = j.at("axis").get<std::string>() == "item" ? KnnAxis::item : KnnAxis::user;
      k.normalize = j.at("normalize").get<bool>();
      for (const auto& list : j.at("neighbors")) {
        auto& out = k.neighbors.emplace_back();
        for (const auto& e : list) out.push_back({e.at(0).get<std::uint32_t>(), e.at(1).get<double>()});
      }
      k.train = pattern_from_json(j.at("train"));
      m.state = std::move(k);
      break;
    }
    case Algorithm::popularity:
      m.state = PopularityModel{j.at("counts").get<std::vector<std::uint32_t>>()};
      break;
    case Algorithm::random:
      m.state = RandomModel{j.at("seed").get<std::uint64_t>()};
      break;
  }
  return m;
}

void save_model(const std::filesystem::path& path, const ModelState& model) {
  write_text_file(path, model_to_json(model).dump());
}

ModelState load_model(const std::filesystem::path& path) {
  return model_from_json(json::parse(read_text_file(path)));
}

}  // namespace selbench::recsys
