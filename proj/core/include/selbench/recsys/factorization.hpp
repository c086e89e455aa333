#pragma once

#include <cstdint>
#include <span>

#include <Eigen/Dense>

#include "selbench/corpus/matrix.hpp"
#include "selbench/recsys/config.hpp"

namespace selbench::recsys {

struct FactorModel {
  Eigen::MatrixXd user_factors;  // n_users x f
  Eigen::MatrixXd item_factors;  // n_items x f
};

/// Both factor matrices drawn from uniform(-0.01, 0.01); users first, then
/// items, row-major, from the stream (seed, "init").
FactorModel initialize_factors(std::size_t n_users, std::size_t n_items, std::size_t factors,
                               std::uint64_t seed);

struct FitOptions {
  /// Workers for per-row least-squares solves. Results do not depend on it.
  unsigned threads = 1;
};

// ---------------------------------------------------------------------------
// Alternating least squares, confidence-weighted implicit formulation:
//
//   min  sum_{u,i} c_ui (p_ui - x_u . y_i)^2 + reg (sum |x_u|^2 + sum |y_i|^2)
//
// with p_ui = 1 and c_ui = 1 + alpha on observed pairs, p_ui = 0 and c_ui = 1
// elsewhere.
// ---------------------------------------------------------------------------

struct AlsParams {
  std::size_t factors = 64;
  double regularization = 0.01;
  double alpha = 1.0;
  std::size_t iterations = 15;
};

AlsParams als_params(const RecommenderConfig& config);

/// Exact minimiser for one row given the fixed side:
///   (G + alpha * sum_{i in obs} y_i y_i^T + reg I) x = (1 + alpha) sum_{i in obs} y_i
/// where G = fixed^T fixed.
Eigen::VectorXd als_solve_row(const Eigen::MatrixXd& fixed, const Eigen::MatrixXd& gram,
                              std::span<const std::uint32_t> observed, double alpha, double reg);

/// Re-solves every row of `solved` against `fixed`. `rows` holds, per row of
/// `solved`, the observed column indices into `fixed`.
void als_half_sweep(const corpus::SparsePattern& rows, const Eigen::MatrixXd& fixed,
                    Eigen::MatrixXd& solved, double alpha, double reg, unsigned threads);

double als_objective(const corpus::SparsePattern& train, const FactorModel& model, double alpha,
                     double reg);

/// `iterations` full sweeps (users, then items) from initialize_factors().
FactorModel als_fit(const corpus::InteractionMatrix& train, const RecommenderConfig& config,
                    const FitOptions& options = {});

// ---------------------------------------------------------------------------
// Bayesian personalised ranking: SGD on the triple loss
//
//   L = -ln sigmoid(x_u . (y_i - y_j)) + reg (|x_u|^2 + |y_i|^2 + |y_j|^2)
//
// for an observed item i and an unobserved item j of user u.
// ---------------------------------------------------------------------------

struct BprParams {
  std::size_t factors = 64;
  double learning_rate = 0.01;
  double regularization = 0.01;
  std::size_t epochs = 100;
};

BprParams bpr_params(const RecommenderConfig& config);

struct TripleGradient {
  double loss = 0.0;
  Eigen::VectorXd user;
  Eigen::VectorXd positive;
  Eigen::VectorXd negative;
};

double bpr_triple_loss(const Eigen::VectorXd& user, const Eigen::VectorXd& positive,
                       const Eigen::VectorXd& negative, double reg);
TripleGradient bpr_triple_gradient(const Eigen::VectorXd& user, const Eigen::VectorXd& positive,
                                   const Eigen::VectorXd& negative, double reg);

/// Each epoch visits every observed interaction once, in an order shuffled by
/// the stream (seed, "bpr", epoch), pairing it with a negative item drawn
/// uniformly from the user's unobserved items.
FactorModel bpr_fit(const corpus::InteractionMatrix& train, const RecommenderConfig& config);

/// Throws NumericalError if any entry is NaN or infinite.
void check_finite(const FactorModel& model, std::string_view context);

}  // namespace selbench::recsys
