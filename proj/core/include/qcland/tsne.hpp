#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <vector>

#include "qcland/control_problem.hpp"

namespace qcland {

struct EmbeddingConfig {
  double perplexity = 60.0;
  int iterations = 1000;
  double learning_rate = 200.0;
  double exaggeration = 12.0;
  int exaggeration_epochs = 250;
  double momentum_initial = 0.5;
  double momentum_final = 0.8;
  int momentum_switch_epoch = 250;
  int final_descent_epochs = 100;  // plain descent with backtracking at the end
  std::uint64_t seed = 0;
  double bh_angle = 0.5;  // provenance metadata only; the gradient is exact
  int n_threads = 1;
};

struct EmbeddingResult {
  Eigen::MatrixX2d points;
  double kl = 0.0;                // final KL divergence (unexaggerated P)
  std::vector<double> kl_trace;   // one entry per epoch
  int unconverged_rows = 0;       // bandwidth searches that hit the step cap
  bool degenerate = false;        // all-identical inputs, collapsed output
};

/// Per-row Gaussian bandwidths found by bisection so each conditional
/// distribution has Shannon entropy log2(perplexity) within 1e-5; rows of
/// the returned matrix sum to 1. Distances must be square, symmetric,
/// nonnegative with a zero diagonal.
Eigen::MatrixXd perplexity_calibration(const Eigen::MatrixXd& distances,
                                       double perplexity, int* unconverged = nullptr);

/// Exact O(N^2) t-SNE on a distance matrix: symmetrized affinities,
/// Student-t low-dimensional kernel, momentum gradient descent with early
/// exaggeration, then a backtracking descent tail that keeps the KL trace
/// nonincreasing. Deterministic given the seed.
EmbeddingResult tsne(const Eigen::MatrixXd& distances, const EmbeddingConfig& config);

/// Same pipeline fed with normalized Hamming distances of the protocols.
EmbeddingResult tsne_protocols(std::span<const Protocol> protocols,
                               const EmbeddingConfig& config);

}  // namespace qcland
