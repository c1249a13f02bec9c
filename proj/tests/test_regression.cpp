#include <doctest.h>

#include <algorithm>
#include <bit>
#include <cmath>

#include "qcland/effective_model.hpp"
#include "qcland/regression.hpp"
#include "qcland/rng.hpp"

using namespace qcland;

namespace {

struct Synthetic {
  std::vector<Protocol> protocols;
  std::vector<double> costs;
  MultilinearModel truth;
};

/// Random order-2 generator plus optional Gaussian noise.
Synthetic synthetic_order2(int n, int n_records, int n_pairs, double noise,
                           std::uint64_t seed) {
  Rng rng(seed);
  Synthetic out;
  out.truth.n_bangs = n;
  out.truth.intercept = 0.4;
  std::vector<std::uint64_t> masks;
  std::vector<double> weights;
  for (int j = 0; j < n; ++j) {
    masks.push_back(std::uint64_t{1} << j);
    weights.push_back(rng.uniform01() - 0.5);
  }
  int placed = 0;
  while (placed < n_pairs) {
    const int i = static_cast<int>(rng.below(n));
    const int j = static_cast<int>(rng.below(n));
    if (i == j) continue;
    const std::uint64_t m = (std::uint64_t{1} << i) | (std::uint64_t{1} << j);
    if (std::find(masks.begin(), masks.end(), m) != masks.end()) continue;
    masks.push_back(m);
    weights.push_back(0.5 + rng.uniform01());
    ++placed;
  }
  out.truth.masks = masks;
  out.truth.weights = Eigen::Map<Eigen::VectorXd>(weights.data(), weights.size());
  for (int r = 0; r < n_records; ++r) {
    Protocol p = random_protocol(n, rng);
    double c = out.truth.evaluate(p);
    if (noise > 0) c += noise * rng.normal();
    out.protocols.push_back(std::move(p));
    out.costs.push_back(c);
  }
  return out;
}

}  // namespace

TEST_SUITE("regression") {

TEST_CASE("perfect predictions score one, the mean predictor zero") {
  const std::vector<double> truth{1.0, 2.0, 3.0, 4.0};
  CHECK(r_squared(truth, truth) == doctest::Approx(1.0));
  const std::vector<double> mean_pred(4, 2.5);
  CHECK(r_squared(truth, mean_pred) == doctest::Approx(0.0));
}

TEST_CASE("hand-computed r-squared value") {
  const std::vector<double> truth{1.0, 2.0, 3.0};
  const std::vector<double> pred{1.1, 1.9, 3.2};
  // residuals 0.01 + 0.01 + 0.04 = 0.06 against total 2.0
  CHECK(r_squared(truth, pred) == doctest::Approx(0.97).epsilon(1e-12));
}

TEST_CASE("degenerate r-squared inputs are rejected") {
  const std::vector<double> constant{1.0, 1.0, 1.0};
  const std::vector<double> pred{1.0, 2.0, 3.0};
  CHECK_THROWS_AS(r_squared(constant, pred), std::invalid_argument);
  const std::vector<double> one{1.0};
  CHECK_THROWS_AS(r_squared(one, one), std::invalid_argument);
  const std::vector<double> two{1.0, 2.0};
  CHECK_THROWS_AS(r_squared(two, pred), std::invalid_argument);
}

TEST_CASE("the predicted-mean variant differs for biased predictors") {
  const std::vector<double> truth{1.0, 2.0, 3.0};
  const std::vector<double> biased{2.0, 3.0, 4.0};
  CHECK(r_squared(truth, biased, false) == doctest::Approx(-0.5));
  CHECK(r_squared(truth, biased, true) != r_squared(truth, biased, false));
}

TEST_CASE("ridge recovers an exact order-2 model") {
  const Synthetic data = synthetic_order2(12, 1500, 10, 0.0, 42);
  FitOptions options;
  options.orders = {1, 2};
  options.regularizer = Regularizer::ridge;
  options.lambda = 1e-12;
  options.split_seed = 7;
  const FitResult fit = fit_low_manifold(data.protocols, data.costs, options);
  CHECK(fit.r2_test > 0.999);
  CHECK(std::abs(fit.model.intercept - data.truth.intercept) < 1e-6);
  for (std::size_t c = 0; c < data.truth.masks.size(); ++c)
    CHECK(std::abs(fit.model.weight_for(data.truth.masks[c]) - data.truth.weights(c)) <
          1e-6);
}

TEST_CASE("pure-noise targets carry no predictive power") {
  Rng rng(5);
  std::vector<Protocol> protocols;
  std::vector<double> costs;
  for (int r = 0; r < 1200; ++r) {
    protocols.push_back(random_protocol(10, rng));
    costs.push_back(rng.normal());
  }
  FitOptions options;
  options.orders = {1, 2};
  options.regularizer = Regularizer::ridge;
  options.lambda = 1e-6;
  options.split_seed = 11;
  const FitResult fit = fit_low_manifold(protocols, costs, options);
  CHECK(std::abs(fit.r2_test) < 0.15);
}

TEST_CASE("lasso recovers a sparse support with few false positives") {
  const int n = 20;
  const Synthetic data = synthetic_order2(n, 600, 5, 0.01, 99);
  // keep only the 5 planted pair couplings as "true" support
  std::vector<std::uint64_t> true_pairs;
  for (std::size_t c = 0; c < data.truth.masks.size(); ++c)
    if (std::popcount(data.truth.masks[c]) == 2) true_pairs.push_back(data.truth.masks[c]);
  REQUIRE(true_pairs.size() == 5);

  FitOptions options;
  options.orders = {1, 2};
  options.regularizer = Regularizer::lasso;
  options.split_seed = 3;
  const std::vector<double> grid = default_lambda_grid();
  const FitResult best = fit_lambda_grid(data.protocols, data.costs, options, grid);
  CHECK(best.converged);

  const double threshold = 0.05;  // a tenth of the smallest planted coupling
  int recovered = 0, false_positives = 0;
  for (std::size_t c = 0; c < best.model.masks.size(); ++c) {
    if (std::popcount(best.model.masks[c]) != 2) continue;
    const bool active = std::abs(best.model.weights(c)) > threshold;
    const bool planted = std::find(true_pairs.begin(), true_pairs.end(),
                                   best.model.masks[c]) != true_pairs.end();
    if (planted && active) ++recovered;
    if (!planted && active) ++false_positives;
  }
  CHECK(recovered == 5);
  CHECK(false_positives <= 2);
}

TEST_CASE("training residuals are nondecreasing in the ridge penalty") {
  const Synthetic data = synthetic_order2(10, 600, 6, 0.05, 13);
  FitOptions options;
  options.orders = {1, 2};
  options.regularizer = Regularizer::ridge;
  options.split_seed = 17;
  double last_r2 = 2.0;
  for (double lambda : {1e-9, 1e-6, 1e-3, 1e-1, 1.0, 10.0}) {
    options.lambda = lambda;
    const FitResult fit = fit_low_manifold(data.protocols, data.costs, options);
    CHECK(fit.r2_train <= last_r2 + 1e-12);  // same split: residual norm grows
    last_r2 = fit.r2_train;
  }
}

TEST_CASE("an overparameterized design is rejected") {
  const Synthetic data = synthetic_order2(12, 60, 4, 0.0, 21);
  FitOptions options;
  options.orders = {1, 2};  // 78 features against 60 records
  CHECK_THROWS_AS(fit_low_manifold(data.protocols, data.costs, options),
                  std::invalid_argument);
}

TEST_CASE("the split respects the 5:3 proportion") {
  const Synthetic data = synthetic_order2(8, 800, 3, 0.0, 31);
  FitOptions options;
  options.orders = {1};
  options.lambda = 1e-8;
  const FitResult fit = fit_low_manifold(data.protocols, data.costs, options);
  CHECK(fit.n_train == 500);
  CHECK(fit.n_test == 300);
}

TEST_CASE("lowest-cost selection is rank based") {
  const std::vector<double> costs{5.0, 1.0, 3.0, 1.0, 0.5};
  const auto idx = lowest_cost_indices(costs, 3);
  CHECK(idx == std::vector<std::size_t>{4, 1, 3});
}

}  // TEST_SUITE
