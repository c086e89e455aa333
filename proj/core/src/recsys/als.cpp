#include <cmath>
#include <string>

#include "selbench/recsys/factorization.hpp"

namespace selbench::recsys {

FactorModel initialize_factors(std::size_t n_users, std::size_t n_items, std::size_t factors,
                               std::uint64_t seed) {
  FactorModel m;
  m.user_factors.resize(static_cast<Eigen::Index>(n_users), static_cast<Eigen::Index>(factors));
  m.item_factors.resize(static_cast<Eigen::Index>(n_items), static_cast<Eigen::Index>(factors));
  Rng rng(seed, "init");
  for (auto* mat : {&m.user_factors, &m.item_factors}) {
    for (Eigen::Index r = 0; r < mat->rows(); ++r) {
      for (Eigen::Index c = 0; c < mat->cols(); ++c) (*mat)(r, c) = rng.uniform(-0.01, 0.01);
    }
  }
  return m;
}

void check_finite(const FactorModel& model, std::string_view context) {
  if (!model.user_factors.allFinite() || !model.item_factors.allFinite()) {
    throw NumericalError(std::string(context) + ": non-finite factor values");
  }
}

AlsParams als_params(const RecommenderConfig& config) {
  AlsParams p;
  const auto factors = config.get_int("factors", static_cast<std::int64_t>(p.factors));
  const auto iterations = config.get_int("iterations", static_cast<std::int64_t>(p.iterations));
  p.regularization = config.get_real("regularization", p.regularization);
  p.alpha = config.get_real("confidence_alpha", p.alpha);
  if (factors < 1) throw ConfigError("als: factors must be >= 1");
  if (iterations < 0) throw ConfigError("als: iterations must be >= 0");
  if (!(p.regularization > 0.0)) throw ConfigError("als: regularization must be > 0");
  if (!(p.alpha > 0.0)) throw ConfigError("als: confidence_alpha must be > 0");
  p.factors = static_cast<std::size_t>(factors);
  p.iterations = static_cast<std::size_t>(iterations);
  return p;
}

Eigen::VectorXd als_solve_row(const Eigen::MatrixXd& fixed, const Eigen::MatrixXd& gram,
                              std::span<const std::uint32_t> observed, double alpha, double reg) {
  const auto f = fixed.cols();
  Eigen::MatrixXd a = gram;
  a.diagonal().array() += reg;
  Eigen::VectorXd b = Eigen::VectorXd::Zero(f);
  for (auto i : observed) {
    const auto y = fixed.row(i).transpose();
    a.selfadjointView<Eigen::Lower>().rankUpdate(y, alpha);
    b += (1.0 + alpha) * y;
  }
  Eigen::LLT<Eigen::MatrixXd, Eigen::Lower> llt(a);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("als: normal equations not positive definite");
  }
  Eigen::VectorXd x = llt.solve(b);
  if (!x.allFinite()) throw NumericalError("als: non-finite solution");
  return x;
}

void als_half_sweep(const corpus::SparsePattern& rows, const Eigen::MatrixXd& fixed,
                    Eigen::MatrixXd& solved, double alpha, double reg, unsigned threads) {
  const Eigen::MatrixXd gram = fixed.transpose() * fixed;
  parallel_for(rows.n_rows(), threads, [&](std::size_t r) {
    solved.row(static_cast<Eigen::Index>(r)) =
        als_solve_row(fixed, gram, rows.row(r), alpha, reg).transpose();
  });
}

double als_objective(const corpus::SparsePattern& train, const FactorModel& model, double alpha,
                     double reg) {
  const auto& x = model.user_factors;
  const auto& y = model.item_factors;
  // sum over all pairs of (x_u . y_i)^2, then correct the observed cells
  const Eigen::MatrixXd xtx = x.transpose() * x;
  const Eigen::MatrixXd yty = y.transpose() * y;
  double total = (xtx.array() * yty.array()).sum();
  for (std::size_t u = 0; u < train.n_rows(); ++u) {
    for (auto i : train.row(u)) {
      const double s = x.row(static_cast<Eigen::Index>(u)).dot(y.row(i));
      total += (1.0 + alpha) * (1.0 - s) * (1.0 - s) - s * s;
    }
  }
  total += reg * (x.squaredNorm() + y.squaredNorm());
  return total;
}

FactorModel als_fit(const corpus::InteractionMatrix& train, const RecommenderConfig& config,
                    const FitOptions& options) {
  const auto p = als_params(config);
  auto model = initialize_factors(train.n_users(), train.n_items(), p.factors, config.seed);
  const auto item_rows = train.pattern().transposed();
  for (std::size_t it = 0; it < p.iterations; ++it) {
    als_half_sweep(train.pattern(), model.item_factors, model.user_factors, p.alpha,
                   p.regularization, options.threads);
    als_half_sweep(item_rows, model.user_factors, model.item_factors, p.alpha, p.regularization,
                   options.threads);
  }
  check_finite(model, "als");
  return model;
}

}  // namespace selbench::recsys
