#include "qcland/regression.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "qcland/combinatorics.hpp"
#include "qcland/rng.hpp"

namespace qcland {

std::string to_string(Regularizer r) {
  return r == Regularizer::ridge ? "ridge" : "lasso";
}

double MultilinearModel::evaluate(const Protocol& protocol) const {
  const std::uint64_t s = protocol_index(protocol);
  double e = intercept;
  for (std::size_t c = 0; c < masks.size(); ++c)
    e += (std::popcount(masks[c] & s) & 1) ? -weights(c) : weights(c);
  return e;
}

double MultilinearModel::weight_for(std::uint64_t mask) const {
  for (std::size_t c = 0; c < masks.size(); ++c)
    if (masks[c] == mask) return weights(c);
  return 0.0;
}

double r_squared(std::span<const double> truth, std::span<const double> predicted,
                 bool about_predicted_mean) {
  if (truth.size() != predicted.size())
    throw std::invalid_argument("r_squared needs equal-length inputs");
  if (truth.size() < 2) throw std::invalid_argument("r_squared needs at least 2 points");
  const double n = static_cast<double>(truth.size());
  double center = 0.0;
  for (double v : about_predicted_mean ? predicted : truth) center += v;
  center /= n;
  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const double r = truth[i] - predicted[i];
    const double d = truth[i] - center;
    ss_res += r * r;
    ss_tot += d * d;
  }
  if (ss_tot == 0.0) throw std::invalid_argument("r_squared is undefined at zero variance");
  return 1.0 - ss_res / ss_tot;
}

namespace {

std::vector<std::uint64_t> feature_masks(int n, std::span<const int> orders) {
  std::vector<std::uint64_t> masks;
  for (int o : orders) {
    if (o < 1 || o > n) throw std::invalid_argument("fit orders must lie in [1, N_T]");
    if (o > 3) throw std::invalid_argument("fitted model classes stop at 3-body terms");
    for_each_combination(n, o, [&](const std::vector<int>& c) {
      std::uint64_t m = 0;
      for (int p : c) m |= std::uint64_t{1} << p;
      masks.push_back(m);
    });
  }
  return masks;
}

}  // namespace

FitResult fit_low_manifold(std::span<const Protocol> protocols,
                           std::span<const double> costs, const FitOptions& options) {
  const std::size_t n_records = protocols.size();
  if (n_records != costs.size())
    throw std::invalid_argument("protocols and costs must pair up");
  if (n_records < 4) throw std::invalid_argument("too few records to split and fit");
  const int n = static_cast<int>(protocols[0].size());

  const std::vector<std::uint64_t> masks = feature_masks(n, options.orders);
  const Eigen::Index p = static_cast<Eigen::Index>(masks.size());
  if (static_cast<std::size_t>(p) >= n_records)
    throw std::invalid_argument("design dimension must be below the record count");

  // seeded 5:3 split
  std::vector<std::size_t> order(n_records);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(derive_seed(options.split_seed, "train-test-split"));
  rng.shuffle(order);
  const std::size_t n_train = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::llround(options.train_fraction * n_records)), 2,
      n_records - 2);
  const std::size_t n_test = n_records - n_train;

  Eigen::MatrixXd x_train(n_train, p), x_test(n_test, p);
  Eigen::VectorXd y_train(n_train), y_test(n_test);
  for (std::size_t r = 0; r < n_records; ++r) {
    const std::uint64_t s = protocol_index(protocols[order[r]]);
    const bool in_train = r < n_train;
    Eigen::Index row = in_train ? r : r - n_train;
    auto& x = in_train ? x_train : x_test;
    for (Eigen::Index c = 0; c < p; ++c)
      x(row, c) = (std::popcount(masks[c] & s) & 1) ? -1.0 : 1.0;
    (in_train ? y_train(row) : y_test(row)) = costs[order[r]];
  }

  // center and scale on the training split; intercept stays unpenalized
  const Eigen::RowVectorXd mu = x_train.colwise().mean();
  Eigen::RowVectorXd sd(p);
  for (Eigen::Index c = 0; c < p; ++c) {
    const double v = (x_train.col(c).array() - mu(c)).square().sum() / n_train;
    sd(c) = v > 0 ? std::sqrt(v) : 1.0;  // constant columns stay zero after centering
  }
  x_train = (x_train.rowwise() - mu).array().rowwise() / sd.array();
  x_test = (x_test.rowwise() - mu).array().rowwise() / sd.array();
  const double y_mean = y_train.mean();
  const Eigen::VectorXd yc = y_train.array() - y_mean;

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
  bool converged = true;
  const double nt = static_cast<double>(n_train);

  if (options.regularizer == Regularizer::ridge) {
    const double lambda = std::max(options.lambda, 1e-12);
    Eigen::MatrixXd gram = x_train.transpose() * x_train / nt;
    gram.diagonal().array() += 2.0 * lambda;
    beta = gram.ldlt().solve(x_train.transpose() * yc / nt);
  } else {
    // cyclic coordinate descent on (1/2n)||y - Xb||^2 + lambda |b|_1
    Eigen::VectorXd z(p);
    for (Eigen::Index c = 0; c < p; ++c) z(c) = x_train.col(c).squaredNorm() / nt;
    Eigen::VectorXd residual = yc;
    converged = false;
    for (int sweep = 0; sweep < options.max_sweeps; ++sweep) {
      double max_delta = 0.0;
      for (Eigen::Index c = 0; c < p; ++c) {
        if (z(c) == 0.0) continue;
        const double old = beta(c);
        const double rho = x_train.col(c).dot(residual) / nt + z(c) * old;
        double next = 0.0;
        if (rho > options.lambda)
          next = (rho - options.lambda) / z(c);
        else if (rho < -options.lambda)
          next = (rho + options.lambda) / z(c);
        if (next != old) {
          residual -= (next - old) * x_train.col(c);
          beta(c) = next;
          max_delta = std::max(max_delta, std::abs(next - old));
        }
      }
      if (max_delta < options.tol) {
        converged = true;
        break;
      }
    }
  }

  FitResult result;
  result.regularizer = options.regularizer;
  result.lambda = options.lambda;
  result.converged = converged;
  result.n_train = static_cast<int>(n_train);
  result.n_test = static_cast<int>(n_test);
  result.split_seed = options.split_seed;

  // back to the unscaled +-1 feature basis
  MultilinearModel model;
  model.n_bangs = n;
  model.masks = masks;
  model.weights = beta.array() / sd.transpose().array();
  model.intercept = y_mean - mu.dot(model.weights);
  result.model = std::move(model);

  const Eigen::VectorXd pred_train =
      (x_train * beta).array() + y_mean;
  const Eigen::VectorXd pred_test = (x_test * beta).array() + y_mean;
  std::vector<double> t_train(y_train.data(), y_train.data() + n_train);
  std::vector<double> p_train(pred_train.data(), pred_train.data() + n_train);
  std::vector<double> t_test(y_test.data(), y_test.data() + n_test);
  std::vector<double> p_test(pred_test.data(), pred_test.data() + n_test);
  result.r2_train =
      r_squared(t_train, p_train, options.r2_about_predicted_mean);
  result.r2_test = r_squared(t_test, p_test, options.r2_about_predicted_mean);
  return result;
}

FitResult fit_lambda_grid(std::span<const Protocol> protocols,
                          std::span<const double> costs, FitOptions base,
                          std::span<const double> lambdas,
                          std::vector<FitResult>* all) {
  if (lambdas.empty()) throw std::invalid_argument("lambda grid is empty");
  FitResult best;
  bool have = false;
  for (double lambda : lambdas) {
    base.lambda = lambda;
    FitResult fit = fit_low_manifold(protocols, costs, base);
    if (all) all->push_back(fit);
    if (!have || fit.r2_test > best.r2_test) {
      best = std::move(fit);
      have = true;
    }
  }
  return best;
}

std::vector<double> default_lambda_grid() {
  std::vector<double> grid;
  for (int e = -9; e <= -1; ++e) grid.push_back(std::pow(10.0, e));
  return grid;
}

std::vector<std::size_t> lowest_cost_indices(std::span<const double> costs,
                                             std::size_t count) {
  std::vector<std::size_t> idx(costs.size());
  std::iota(idx.begin(), idx.end(), 0);
  count = std::min(count, idx.size());
  std::partial_sort(idx.begin(), idx.begin() + count, idx.end(),
                    [&](std::size_t a, std::size_t b) {
                      return costs[a] != costs[b] ? costs[a] < costs[b] : a < b;
                    });
  idx.resize(count);
  return idx;
}

}  // namespace qcland
