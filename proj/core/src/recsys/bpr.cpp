#include <cmath>

#include "selbench/recsys/factorization.hpp"

namespace selbench::recsys {

namespace {

// -ln sigmoid(x), stable for large |x|
double neg_log_sigmoid(double x) {
  return x > 0 ? std::log1p(std::exp(-x)) : -x + std::log1p(std::exp(x));
}

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

BprParams bpr_params(const RecommenderConfig& config) {
  BprParams p;
  const auto factors = config.get_int("factors", static_cast<std::int64_t>(p.factors));
  const auto epochs = config.get_int("epochs", static_cast<std::int64_t>(p.epochs));
  p.learning_rate = config.get_real("learning_rate", p.learning_rate);
  p.regularization = config.get_real("regularization", p.regularization);
  if (factors < 1) throw ConfigError("bpr: factors must be >= 1");
  if (epochs < 0) throw ConfigError("bpr: epochs must be >= 0");
  if (!(p.learning_rate > 0.0)) throw ConfigError("bpr: learning_rate must be > 0");
  if (!(p.regularization >= 0.0)) throw ConfigError("bpr: regularization must be >= 0");
  p.factors = static_cast<std::size_t>(factors);
  p.epochs = static_cast<std::size_t>(epochs);
  return p;
}

double bpr_triple_loss(const Eigen::VectorXd& user, const Eigen::VectorXd& positive,
                       const Eigen::VectorXd& negative, double reg) {
  const double x = user.dot(positive - negative);
  return neg_log_sigmoid(x) +
         reg * (user.squaredNorm() + positive.squaredNorm() + negative.squaredNorm());
}

TripleGradient bpr_triple_gradient(const Eigen::VectorXd& user, const Eigen::VectorXd& positive,
                                   const Eigen::VectorXd& negative, double reg) {
  const double x = user.dot(positive - negative);
  const double g = sigmoid(-x);  // -(d/dx) ln sigmoid(x)
  TripleGradient out;
  out.loss = neg_log_sigmoid(x) +
             reg * (user.squaredNorm() + positive.squaredNorm() + negative.squaredNorm());
  out.user = -g * (positive - negative) + 2.0 * reg * user;
  out.positive = -g * user + 2.0 * reg * positive;
  out.negative = g * user + 2.0 * reg * negative;
  return out;
}

FactorModel bpr_fit(const corpus::InteractionMatrix& train, const RecommenderConfig& config) {
  const auto p = bpr_params(config);
  auto model = initialize_factors(train.n_users(), train.n_items(), p.factors, config.seed);
  const auto& pattern = train.pattern();
  const std::size_t n_items = train.n_items();

  // (user, item) of every observed interaction, row-major
  std::vector<std::pair<UserIndex, ItemIndex>> observed;
  observed.reserve(pattern.nnz());
  for (UserIndex u = 0; u < pattern.n_rows(); ++u) {
    if (pattern.row_size(u) >= n_items) continue;  // no negative exists
    for (auto i : pattern.row(u)) observed.emplace_back(u, i);
  }
  std::vector<std::size_t> order(observed.size());

  const double lr = p.learning_rate;
  const double reg = p.regularization;
  Eigen::VectorXd user_old(static_cast<Eigen::Index>(p.factors));
  for (std::size_t epoch = 0; epoch < p.epochs; ++epoch) {
    Rng rng(config.seed, "bpr", {epoch});
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
    rng.shuffle(std::span<std::size_t>(order));
    for (auto k : order) {
      const auto [u, i] = observed[k];
      ItemIndex j;
      do {
        j = static_cast<ItemIndex>(rng.below(n_items));
      } while (pattern.contains(u, j));

      auto xu = model.user_factors.row(u);
      auto yi = model.item_factors.row(i);
      auto yj = model.item_factors.row(j);
      const double x = xu.dot(yi - yj);
      const double g = sigmoid(-x);
      user_old = xu.transpose();
      xu -= lr * (-g * (yi - yj) + 2.0 * reg * xu);
      yi -= lr * (-g * user_old.transpose() + 2.0 * reg * yi);
      yj -= lr * (g * user_old.transpose() + 2.0 * reg * yj);
    }
    check_finite(model, "bpr");
  }
  return model;
}

}  // namespace selbench::recsys
