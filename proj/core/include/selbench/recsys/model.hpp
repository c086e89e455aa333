#pragma once

#include <filesystem>
#include <span>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "selbench/recsys/factorization.hpp"
#include "selbench/recsys/neighbors.hpp"

namespace selbench::recsys {

struct KnnModel {
  KnnAxis axis = KnnAxis::item;
  SimilarityTable neighbors;
  /// Divide aggregated scores by the summed neighbour similarity.
  bool normalize = false;
  corpus::SparsePattern train;  // user x item, needed at scoring time
};

struct PopularityModel {
  std::vector<std::uint32_t> counts;  // training interactions per item
};

struct RandomModel {
  std::uint64_t seed = 0;
};

/// A trained model. Immutable after fit() and safe to share across threads.
struct ModelState {
  Algorithm algorithm = Algorithm::popularity;
  std::size_t n_users = 0;
  std::size_t n_items = 0;
  std::variant<FactorModel, KnnModel, PopularityModel, RandomModel> state;
};

ModelState fit(const corpus::InteractionMatrix& train, const RecommenderConfig& config,
               const FitOptions& options = {});

/// Raw scores for every item for one user.
///   factor models  x_u . y_i
///   item kNN       sum over training items j of u of sim(j, i), over the
///                  truncated neighbour lists of j
///   user kNN       sum over neighbours v of u holding i of sim(u, v)
///   popularity     training count of i
///   random         uniform(0, 1) draws from the stream (seed, "random", u)
std::vector<double> score_items(const ModelState& model, UserIndex user);

/// One user's ordered predictions.
struct RankedList {
  UserIndex user = 0;
  std::vector<ItemIndex> items;
  std::vector<double> scores;  // non-increasing
};

/// Top `p_len` items outside `exclude`, by score descending then item index
/// ascending. Throws ConfigError when fewer than `p_len` items remain.
RankedList recommend(const ModelState& model, UserIndex user, std::span<const ItemIndex> exclude,
                     std::size_t p_len);

/// Versioned JSON artifact; doubles are written in shortest round-trip form
/// so a loaded model scores bit-identically.
nlohmann::json model_to_json(const ModelState& model);
ModelState model_from_json(const nlohmann::json& j);
void save_model(const std::filesystem::path& path, const ModelState& model);
ModelState load_model(const std::filesystem::path& path);

inline constexpr std::string_view kModelFormat = "selbench.model/1";

}  // namespace selbench::recsys
