#include "selbench/recsys/model.hpp"

#include <algorithm>
#include <numeric>

namespace selbench::recsys {

namespace {

KnnModel fit_knn(const corpus::InteractionMatrix& train, const RecommenderConfig& config,
                 KnnAxis axis) {
  const auto neighbors = config.get_int("neighbors", 20);
  if (neighbors < 1) throw ConfigError("knn: neighbors must be >= 1");
  const auto weighting = weighting_from_string(config.get_string("weighting", "none"));
  const double k1 = config.get_real("bm25_k1", 1.2);
  const double b = config.get_real("bm25_b", 0.75);
  const bool normalize_default = axis == KnnAxis::user;
  KnnModel m;
  m.axis = axis;
  m.normalize = config.get_int("normalize", normalize_default ? 1 : 0) != 0;
  m.neighbors = knn_similarity(weight_matrix(train, weighting, k1, b), axis,
                               static_cast<std::size_t>(neighbors));
  m.train = train.pattern();
  return m;
}

}  // namespace

ModelState fit(const corpus::InteractionMatrix& train, const RecommenderConfig& config,
               const FitOptions& options) {
  ModelState model;
  model.algorithm = config.algorithm;
  model.n_users = train.n_users();
  model.n_items = train.n_items();
  switch (config.algorithm) {
    case Algorithm::als:
      model.state = als_fit(train, config, options);
      break;
    case Algorithm::bpr:
      model.state = bpr_fit(train, config);
      break;
    case Algorithm::item_knn:
      model.state = fit_knn(train, config, KnnAxis::item);
      break;
    case Algorithm::user_knn:
      model.state = fit_knn(train, config, KnnAxis::user);
      break;
    case Algorithm::popularity: {
      PopularityModel p;
      p.counts.assign(train.n_items(), 0);
      for (auto c : train.pattern().cols()) ++p.counts[c];
      model.state = std::move(p);
      break;
    }
    case Algorithm::random:
      model.state = RandomModel{config.seed};
      break;
  }
  return model;
}

std::vector<double> score_items(const ModelState& model, UserIndex user) {
  if (user >= model.n_users) throw ConfigError("score_items: unknown user");
  std::vector<double> scores(model.n_items, 0.0);
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, FactorModel>) {
          const Eigen::VectorXd v = s.item_factors * s.user_factors.row(user).transpose();
          std::copy(v.data(), v.data() + v.size(), scores.begin());
        } else if constexpr (std::is_same_v<T, KnnModel>) {
          double mass = 0.0;
          if (s.axis == KnnAxis::item) {
            for (auto j : s.train.row(user)) {
              for (const auto& nb : s.neighbors[j]) {
                scores[nb.index] += nb.similarity;
                mass += nb.similarity;
              }
            }
          } else {
            for (const auto& nb : s.neighbors[user]) {
              for (auto i : s.train.row(nb.index)) scores[i] += nb.similarity;
              mass += nb.similarity;
            }
          }
          if (s.normalize && mass > 0.0) {
            for (auto& x : scores) x /= mass;
          }
        } else if constexpr (std::is_same_v<T, PopularityModel>) {
          for (std::size_t i = 0; i < scores.size(); ++i) scores[i] = s.counts[i];
        } else {
          Rng rng(s.seed, "random", {user});
          for (auto& x : scores) x = rng.uniform01();
        }
      },
      model.state);
  return scores;
}

RankedList recommend(const ModelState& model, UserIndex user, std::span<const ItemIndex> exclude,
                     std::size_t p_len) {
  auto scores = score_items(model, user);
  std::vector<char> excluded(model.n_items, 0);
  for (auto i : exclude) {
    if (i >= model.n_items) throw ConfigError("recommend: excluded item out of range");
    excluded[i] = 1;
  }
  std::vector<ItemIndex> candidates;
  candidates.reserve(model.n_items);
  for (ItemIndex i = 0; i < model.n_items; ++i) {
    if (!excluded[i]) candidates.push_back(i);
  }
  if (p_len > candidates.size()) {
    throw ConfigError("recommend: cannot produce " + std::to_string(p_len) + " items, only " +
                      std::to_string(candidates.size()) + " remain after exclusion");
  }
  const auto better = [&](ItemIndex a, ItemIndex b) {
    return scores[a] != scores[b] ? scores[a] > scores[b] : a < b;
  };
  std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(p_len),
                    candidates.end(), better);
  RankedList out;
  out.user = user;
  out.items.assign(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(p_len));
  out.scores.reserve(p_len);
  for (auto i : out.items) out.scores.push_back(scores[i]);
  return out;
}

}  // namespace selbench::recsys
