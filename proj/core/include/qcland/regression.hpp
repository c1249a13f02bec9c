#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <vector>

#include "qcland/control_problem.hpp"

namespace qcland {

enum class Regularizer { ridge, lasso };

std::string to_string(Regularizer r);

/// Fitted multilinear model over sigma in {-1,+1}^n: an intercept plus one
/// weight per retained monomial (mask of participating positions).
struct MultilinearModel {
  int n_bangs = 0;
  double intercept = 0.0;
  std::vector<std::uint64_t> masks;
  Eigen::VectorXd weights;

  double evaluate(const Protocol& protocol) const;
  double weight_for(std::uint64_t mask) const;  // 0 when the mask is not a feature
};

struct FitOptions {
  std::vector<int> orders{1, 2};
  Regularizer regularizer = Regularizer::ridge;
  double lambda = 1e-6;
  double train_fraction = 5.0 / 8.0;  // 5:3 train/test split
  std::uint64_t split_seed = 0;
  double tol = 1e-8;      // lasso coordinate descent stop, max |delta beta|
  int max_sweeps = 10000;
  bool r2_about_predicted_mean = false;  // alternative denominator centering
};

struct FitResult {
  MultilinearModel model;
  Regularizer regularizer = Regularizer::ridge;
  double lambda = 0.0;
  double r2_train = 0.0;
  double r2_test = 0.0;
  bool converged = true;  // lasso only; ridge solves are exact
  int n_train = 0;
  int n_test = 0;
  std::uint64_t split_seed = 0;
};

/// R^2 = 1 - sum|y - yhat|^2 / sum|y - center|^2 with center the mean of
/// the true values (default) or of the predictions (variant flag).
double r_squared(std::span<const double> truth, std::span<const double> predicted,
                 bool about_predicted_mean = false);

/// Least squares on multilinear features of the protocols with an L2 or L1
/// penalty; features are centered and scaled on the training split, the
/// intercept is unpenalized. Ridge solves the normal equations (lambda
/// floored at 1e-12); lasso runs cyclic coordinate descent with
/// soft-thresholding.
FitResult fit_low_manifold(std::span<const Protocol> protocols,
                           std::span<const double> costs, const FitOptions& options);

/// Runs fit_low_manifold over a lambda grid and keeps the best test R^2.
FitResult fit_lambda_grid(std::span<const Protocol> protocols,
                          std::span<const double> costs, FitOptions base,
                          std::span<const double> lambdas,
                          std::vector<FitResult>* all = nullptr);

/// Default search grid {1e-9, 1e-8, ..., 1e-1}.
std::vector<double> default_lambda_grid();

/// Indices of the `count` lowest values (rank-based low-manifold cutoff),
/// ties broken by index.
std::vector<std::size_t> lowest_cost_indices(std::span<const double> costs,
                                             std::size_t count);

}  // namespace qcland
