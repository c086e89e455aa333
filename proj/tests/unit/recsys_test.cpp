#include <gtest/gtest.h>

#include <cmath>

#include <Eigen/Dense>

#include "selbench/recsys/factorization.hpp"
#include "selbench/recsys/model.hpp"
#include "selbench/recsys/neighbors.hpp"
#include "support.hpp"

namespace selbench::recsys {
namespace {

using corpus::InteractionMatrix;

Eigen::MatrixXd dense(const InteractionMatrix& m) {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m.n_users()),
                                            static_cast<Eigen::Index>(m.n_items()));
  for (UserIndex u = 0; u < m.n_users(); ++u) {
    for (auto i : m.row(u)) d(u, i) = 1.0;
  }
  return d;
}

TEST(Weighting, TfidfAndBm25MatchFormulas) {
  Rng rng(1);
  const auto m = testing::random_matrix(rng, 12, 9, 0.35, 1);
  const double N = static_cast<double>(m.n_users());
  std::vector<double> df(m.n_items(), 0.0);
  for (auto c : m.pattern().cols()) df[c] += 1.0;
  const double avg = static_cast<double>(m.nnz()) / N;

  const auto tfidf = weight_matrix(m, Weighting::tfidf);
  const auto bm25 = weight_matrix(m, Weighting::bm25, 1.5, 0.6);
  const auto plain = weight_matrix(m, Weighting::none);
  std::size_t k = 0;
  for (UserIndex u = 0; u < m.n_users(); ++u) {
    const double len = static_cast<double>(m.row(u).size());
    for (auto i : m.row(u)) {
      const double idf = std::log((N - df[i] + 0.5) / (df[i] + 0.5) + 1.0);
      EXPECT_NEAR(tfidf.values[k], std::log(1.0 + N / df[i]), 1e-15);
      EXPECT_NEAR(bm25.values[k], idf * 2.5 / (1.0 + 1.5 * (1.0 - 0.6 + 0.6 * len / avg)), 1e-15);
      EXPECT_EQ(plain.values[k], 1.0);
      ++k;
    }
  }
}

TEST(Weighting, NamesRoundTrip) {
  EXPECT_EQ(weighting_from_string("cosine"), Weighting::none);
  EXPECT_EQ(weighting_from_string("bm25"), Weighting::bm25);
  EXPECT_EQ(weighting_from_string(to_string(Weighting::tfidf)), Weighting::tfidf);
  EXPECT_THROW(weighting_from_string("okapi"), ConfigError);
}

// Dense cosine between columns of `w` (items) or rows (users).
Eigen::MatrixXd dense_cosine(const Eigen::MatrixXd& w) {
  Eigen::MatrixXd g = w.transpose() * w;
  Eigen::VectorXd norms = g.diagonal().cwiseSqrt();
  for (Eigen::Index a = 0; a < g.rows(); ++a) {
    for (Eigen::Index b = 0; b < g.cols(); ++b) {
      g(a, b) = (norms(a) > 0 && norms(b) > 0) ? g(a, b) / (norms(a) * norms(b)) : 0.0;
    }
  }
  return g;
}

TEST(Knn, MatchesDenseCosineWithTruncation) {
  Rng rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const auto m = testing::random_matrix(rng, 15, 12, 0.3, 1);
    for (auto scheme : {Weighting::none, Weighting::tfidf, Weighting::bm25}) {
      const auto w = weight_matrix(m, scheme);
      Eigen::MatrixXd dw = Eigen::MatrixXd::Zero(15, 12);
      std::size_t k = 0;
      for (UserIndex u = 0; u < m.n_users(); ++u) {
        for (auto i : m.row(u)) dw(u, i) = w.values[k++];
      }
      for (auto axis : {KnnAxis::item, KnnAxis::user}) {
        const auto oracle = axis == KnnAxis::item ? dense_cosine(dw) : dense_cosine(dw.transpose());
        const std::size_t trunc = 1 + rng.below(6);
        const auto table = knn_similarity(w, axis, trunc);
        ASSERT_EQ(table.size(), static_cast<std::size_t>(oracle.rows()));
        for (Eigen::Index a = 0; a < oracle.rows(); ++a) {
          std::vector<Neighbor> expect;
          for (Eigen::Index b = 0; b < oracle.cols(); ++b) {
            if (a != b && oracle(a, b) > 1e-12) expect.push_back({static_cast<std::uint32_t>(b), oracle(a, b)});
          }
          std::stable_sort(expect.begin(), expect.end(), [](const auto& x, const auto& y) {
            return x.similarity > y.similarity + 1e-12;
          });
          if (expect.size() > trunc) expect.resize(trunc);
          const auto& got = table[static_cast<std::size_t>(a)];
          ASSERT_EQ(got.size(), expect.size());
          for (std::size_t j = 0; j < got.size(); ++j) {
            EXPECT_NEAR(got[j].similarity, expect[j].similarity, 1e-12);
            if (j > 0) {
              EXPECT_TRUE(got[j - 1].similarity > got[j].similarity ||
                          (got[j - 1].similarity == got[j].similarity && got[j - 1].index < got[j].index));
            }
          }
        }
      }
    }
  }
}

TEST(Knn, SimilarityIsBitSymmetric) {
  Rng rng(3);
  const auto m = testing::random_matrix(rng, 30, 20, 0.3, 1);
  const auto table = knn_similarity(weight_matrix(m, Weighting::bm25), KnnAxis::item, 1000);
  for (std::uint32_t a = 0; a < table.size(); ++a) {
    for (const auto& nb : table[a]) {
      const auto& back = table[nb.index];
      const auto it = std::find_if(back.begin(), back.end(), [&](const auto& x) { return x.index == a; });
      ASSERT_NE(it, back.end());
      EXPECT_EQ(it->similarity, nb.similarity);
    }
  }
}

TEST(Knn, ItemScoresSumNeighbourSimilarities) {
  Rng rng(4);
  const auto m = testing::random_matrix(rng, 10, 8, 0.4, 1);
  RecommenderConfig cfg{Algorithm::item_knn, {{"neighbors", std::int64_t{3}}}, 0};
  const auto model = fit(m, cfg);
  const auto& knn = std::get<KnnModel>(model.state);
  for (UserIndex u = 0; u < m.n_users(); ++u) {
    std::vector<double> expect(m.n_items(), 0.0);
    for (auto j : m.row(u)) {
      for (const auto& nb : knn.neighbors[j]) expect[nb.index] += nb.similarity;
    }
    const auto got = score_items(model, u);
    for (std::size_t i = 0; i < expect.size(); ++i) EXPECT_NEAR(got[i], expect[i], 1e-12);
  }
}

TEST(Knn, UserScoresSumOverNeighboursHoldingTheItem) {
  Rng rng(5);
  const auto m = testing::random_matrix(rng, 10, 8, 0.4, 1);
  RecommenderConfig cfg{Algorithm::user_knn, {{"neighbors", std::int64_t{4}}, {"normalize", std::int64_t{0}}}, 0};
  const auto model = fit(m, cfg);
  const auto& knn = std::get<KnnModel>(model.state);
  for (UserIndex u = 0; u < m.n_users(); ++u) {
    std::vector<double> expect(m.n_items(), 0.0);
    for (const auto& nb : knn.neighbors[u]) {
      for (auto i : m.row(nb.index)) expect[i] += nb.similarity;
    }
    const auto got = score_items(model, u);
    for (std::size_t i = 0; i < expect.size(); ++i) EXPECT_NEAR(got[i], expect[i], 1e-12);
  }
}

InteractionMatrix three_by_four() {
  auto maps = std::make_shared<corpus::IndexMaps>();
  for (auto u : {"a", "b", "c"}) maps->users.intern(u);
  for (auto i : {"w", "x", "y", "z"}) maps->items.intern(i);
  return InteractionMatrix::from_rows(maps, {{0, 1}, {1, 2}, {2, 3}});
}

TEST(Recommend, TiesBrokenByAscendingItemIndex) {
  const auto m = three_by_four();  // popularity: w=1 x=2 y=2 z=1
  const auto model = fit(m, {Algorithm::popularity, {}, 0});
  const auto list = recommend(model, 0, {}, 4);
  EXPECT_EQ(list.items, (std::vector<ItemIndex>{1, 2, 0, 3}));
  EXPECT_EQ(list.scores, (std::vector<double>{2, 2, 1, 1}));
}

TEST(Recommend, ExcludesAndFailsWhenTooFewRemain) {
  const auto m = three_by_four();
  const auto model = fit(m, {Algorithm::popularity, {}, 0});
  const std::vector<ItemIndex> seen = {1, 2};
  const auto list = recommend(model, 0, seen, 2);
  EXPECT_EQ(list.items, (std::vector<ItemIndex>{0, 3}));
  EXPECT_THROW(recommend(model, 0, seen, 3), ConfigError);
  const std::vector<ItemIndex> bad = {9};
  EXPECT_THROW(recommend(model, 0, bad, 1), ConfigError);
}

TEST(RandomModel, DeterministicPerSeedAndUser) {
  const auto m = three_by_four();
  const auto a = fit(m, {Algorithm::random, {}, 5});
  const auto b = fit(m, {Algorithm::random, {}, 5});
  const auto c = fit(m, {Algorithm::random, {}, 6});
  EXPECT_EQ(score_items(a, 1), score_items(b, 1));
  EXPECT_NE(score_items(a, 1), score_items(c, 1));
  EXPECT_NE(score_items(a, 0), score_items(a, 1));
  for (double s : score_items(a, 2)) {
    EXPECT_GE(s, 0.0);
    EXPECT_LT(s, 1.0);
  }
}

TEST(Als, InitializationRange) {
  const auto f = initialize_factors(20, 30, 8, 3);
  EXPECT_LE(f.user_factors.cwiseAbs().maxCoeff(), 0.01);
  EXPECT_LE(f.item_factors.cwiseAbs().maxCoeff(), 0.01);
  EXPECT_GT(f.item_factors.cwiseAbs().maxCoeff(), 0.009);
  const auto g = initialize_factors(20, 30, 8, 3);
  EXPECT_EQ(f.user_factors, g.user_factors);
}

TEST(Als, RowSolveMatchesDenseWeightedLeastSquares) {
  Rng rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index n = 12, f = 4;
    Eigen::MatrixXd y(n, f);
    for (Eigen::Index r = 0; r < n; ++r) {
      for (Eigen::Index c = 0; c < f; ++c) y(r, c) = rng.uniform(-1, 1);
    }
    std::vector<std::uint32_t> obs;
    for (std::uint32_t i = 0; i < n; ++i) {
      if (rng.uniform01() < 0.4) obs.push_back(i);
    }
    const double alpha = rng.uniform(0.5, 50), reg = rng.uniform(0.01, 1);
    // oracle: (Y^T C Y + reg I) x = Y^T C p with dense C and p
    Eigen::VectorXd c = Eigen::VectorXd::Ones(n), p = Eigen::VectorXd::Zero(n);
    for (auto i : obs) {
      c(i) = 1.0 + alpha;
      p(i) = 1.0;
    }
    const Eigen::MatrixXd a = y.transpose() * c.asDiagonal() * y + reg * Eigen::MatrixXd::Identity(f, f);
    const Eigen::VectorXd expect = a.ldlt().solve(y.transpose() * c.asDiagonal() * p);
    const Eigen::VectorXd got = als_solve_row(y, y.transpose() * y, obs, alpha, reg);
    EXPECT_LT((got - expect).norm(), 1e-10 * (1.0 + expect.norm()));
  }
}

TEST(Als, ObjectiveMatchesDenseSum) {
  Rng rng(7);
  const auto m = testing::random_matrix(rng, 9, 7, 0.3, 1);
  auto model = initialize_factors(9, 7, 3, 1);
  model.user_factors *= 50.0;
  model.item_factors *= 50.0;
  const double alpha = 4.0, reg = 0.3;
  const Eigen::MatrixXd p = dense(m);
  const Eigen::MatrixXd s = model.user_factors * model.item_factors.transpose();
  double expect = 0.0;
  for (Eigen::Index u = 0; u < p.rows(); ++u) {
    for (Eigen::Index i = 0; i < p.cols(); ++i) {
      const double conf = p(u, i) > 0 ? 1.0 + alpha : 1.0;
      expect += conf * (p(u, i) - s(u, i)) * (p(u, i) - s(u, i));
    }
  }
  expect += reg * (model.user_factors.squaredNorm() + model.item_factors.squaredNorm());
  EXPECT_NEAR(als_objective(m.pattern(), model, alpha, reg), expect, 1e-10 * expect);
}

TEST(Als, HalfSweepsNeverIncreaseObjective) {
  Rng rng(8);
  for (int trial = 0; trial < 10; ++trial) {
    const auto m = testing::random_matrix(rng, 20, 25, 0.15, 1);
    const double alpha = rng.uniform(1, 100), reg = std::exp(rng.uniform(std::log(1e-3), 0.0));
    auto model = initialize_factors(20, 25, 6, trial);
    const auto items = m.pattern().transposed();
    double prev = als_objective(m.pattern(), model, alpha, reg);
    for (int sweep = 0; sweep < 8; ++sweep) {
      als_half_sweep(m.pattern(), model.item_factors, model.user_factors, alpha, reg, 1);
      const double mid = als_objective(m.pattern(), model, alpha, reg);
      als_half_sweep(items, model.user_factors, model.item_factors, alpha, reg, 1);
      const double next = als_objective(m.pattern(), model, alpha, reg);
      EXPECT_LE(mid, prev);
      EXPECT_LE(next, mid);
      prev = next;
    }
  }
}

TEST(Als, ThreadCountDoesNotChangeFactors) {
  Rng rng(9);
  const auto m = testing::random_matrix(rng, 40, 30, 0.2, 1);
  RecommenderConfig cfg{Algorithm::als, {{"factors", std::int64_t{5}}, {"iterations", std::int64_t{3}}}, 11};
  const auto a = std::get<FactorModel>(fit(m, cfg, {1}).state);
  const auto b = std::get<FactorModel>(fit(m, cfg, {4}).state);
  EXPECT_EQ(a.user_factors, b.user_factors);
  EXPECT_EQ(a.item_factors, b.item_factors);
}

TEST(Als, RejectsBadParameters) {
  const auto m = three_by_four();
  EXPECT_THROW(fit(m, {Algorithm::als, {{"factors", std::int64_t{0}}}, 0}), ConfigError);
  EXPECT_THROW(fit(m, {Algorithm::als, {{"regularization", 0.0}}, 0}), ConfigError);
  EXPECT_THROW(fit(m, {Algorithm::als, {{"confidence_alpha", -1.0}}, 0}), ConfigError);
  EXPECT_THROW(fit(m, {Algorithm::als, {{"factors", std::string("many")}}, 0}), ConfigError);
}

Eigen::VectorXd random_vector(Rng& rng, Eigen::Index n, double scale) {
  Eigen::VectorXd v(n);
  for (Eigen::Index k = 0; k < n; ++k) v(k) = rng.uniform(-scale, scale);
  return v;
}

TEST(Bpr, GradientMatchesCentralDifferences) {
  Rng rng(10);
  for (int trial = 0; trial < 25; ++trial) {
    const Eigen::Index f = 1 + static_cast<Eigen::Index>(rng.below(8));
    const auto u = random_vector(rng, f, 1.0), p = random_vector(rng, f, 1.0), n = random_vector(rng, f, 1.0);
    const double reg = rng.uniform(0.0, 0.1);
    const auto g = bpr_triple_gradient(u, p, n, reg);
    EXPECT_DOUBLE_EQ(g.loss, bpr_triple_loss(u, p, n, reg));
    const double h = 1e-6;
    for (Eigen::Index k = 0; k < f; ++k) {
      auto du = u, dp = p, dn = n;
      du(k) += h;
      const double fu = bpr_triple_loss(du, p, n, reg);
      du(k) -= 2 * h;
      EXPECT_NEAR(g.user(k), (fu - bpr_triple_loss(du, p, n, reg)) / (2 * h), 1e-7);
      dp(k) += h;
      const double fp = bpr_triple_loss(u, dp, n, reg);
      dp(k) -= 2 * h;
      EXPECT_NEAR(g.positive(k), (fp - bpr_triple_loss(u, dp, n, reg)) / (2 * h), 1e-7);
      dn(k) += h;
      const double fn = bpr_triple_loss(u, p, dn, reg);
      dn(k) -= 2 * h;
      EXPECT_NEAR(g.negative(k), (fn - bpr_triple_loss(u, p, dn, reg)) / (2 * h), 1e-7);
    }
  }
}

TEST(Bpr, LearnsBlockStructure) {
  // two user groups, each consuming its own half of the catalogue
  auto maps = std::make_shared<corpus::IndexMaps>();
  for (int u = 0; u < 40; ++u) maps->users.intern("u" + std::to_string(u));
  for (int i = 0; i < 20; ++i) maps->items.intern("i" + std::to_string(i));
  std::vector<std::vector<ItemIndex>> rows(40);
  Rng rng(11);
  for (int u = 0; u < 40; ++u) {
    const ItemIndex base = u < 20 ? 0 : 10;
    for (ItemIndex i = 0; i < 10; ++i) {
      if (rng.uniform01() < 0.5) rows[u].push_back(base + i);
    }
    if (rows[u].empty()) rows[u].push_back(base);
  }
  const auto m = InteractionMatrix::from_rows(maps, rows);
  RecommenderConfig cfg{Algorithm::bpr,
                        {{"factors", std::int64_t{8}}, {"learning_rate", 0.05}, {"regularization", 0.001},
                         {"epochs", std::int64_t{60}}},
                        3};
  const auto model = fit(m, cfg);
  // held-out AUC proxy: unobserved in-block items should outscore out-of-block items
  std::size_t right = 0, total = 0;
  for (UserIndex u = 0; u < 40; ++u) {
    const auto s = score_items(model, u);
    const ItemIndex base = u < 20 ? 0 : 10, other = u < 20 ? 10 : 0;
    for (ItemIndex i = 0; i < 10; ++i) {
      if (m.contains(u, base + i)) continue;
      for (ItemIndex j = 0; j < 10; ++j) {
        right += s[base + i] > s[other + j] ? 1 : 0;
        ++total;
      }
    }
  }
  EXPECT_GT(static_cast<double>(right) / static_cast<double>(total), 0.9);
  const auto again = fit(m, cfg);
  EXPECT_EQ(std::get<FactorModel>(model.state).user_factors,
            std::get<FactorModel>(again.state).user_factors);
}

TEST(Bpr, DivergenceIsReported) {
  Rng rng(12);
  const auto m = testing::random_matrix(rng, 20, 20, 0.3, 1);
  RecommenderConfig cfg{Algorithm::bpr,
                        {{"factors", std::int64_t{4}}, {"learning_rate", 1e300}, {"epochs", std::int64_t{3}}},
                        0};
  EXPECT_THROW(fit(m, cfg), NumericalError);
}

TEST(Serialization, RoundTripScoresBitIdentical) {
  Rng rng(13);
  const auto m = testing::random_matrix(rng, 25, 18, 0.25, 1);
  testing::TempDir dir("model");
  const std::vector<RecommenderConfig> configs = {
      {Algorithm::als, {{"factors", std::int64_t{4}}, {"iterations", std::int64_t{2}}}, 1},
      {Algorithm::bpr, {{"factors", std::int64_t{4}}, {"epochs", std::int64_t{2}}}, 1},
      {Algorithm::item_knn, {{"neighbors", std::int64_t{5}}, {"weighting", std::string("bm25")}}, 0},
      {Algorithm::user_knn, {{"neighbors", std::int64_t{5}}}, 0},
      {Algorithm::popularity, {}, 0},
      {Algorithm::random, {}, 99}};
  for (const auto& cfg : configs) {
    const auto model = fit(m, cfg);
    const auto path = dir.path() / (std::string(to_string(cfg.algorithm)) + ".json");
    save_model(path, model);
    const auto back = load_model(path);
    EXPECT_EQ(back.algorithm, model.algorithm);
    for (UserIndex u = 0; u < m.n_users(); ++u) ASSERT_EQ(score_items(back, u), score_items(model, u));
  }
  auto j = model_to_json(fit(m, configs[4]));
  EXPECT_EQ(j.at("format"), std::string(kModelFormat));
  j["format"] = "selbench.model/0";
  EXPECT_THROW(model_from_json(j), InputError);
}

TEST(Config, JsonRoundTrip) {
  RecommenderConfig cfg{Algorithm::item_knn,
                        {{"neighbors", std::int64_t{7}}, {"bm25_k1", 1.25}, {"weighting", std::string("bm25")}},
                        123};
  EXPECT_EQ(config_from_json(config_to_json(cfg)), cfg);
  EXPECT_EQ(algorithm_from_string("item_knn"), Algorithm::item_knn);
  EXPECT_THROW(algorithm_from_string("svd"), ConfigError);
  EXPECT_EQ(cfg.get_real("neighbors", 0.0), 7.0);
  EXPECT_THROW(cfg.get_int("bm25_k1", 0), ConfigError);
}

}  // namespace
}  // namespace selbench::recsys
