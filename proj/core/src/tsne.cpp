#include "qcland/tsne.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qcland/landscape_stats.hpp"
#include "qcland/parallel.hpp"
#include "qcland/rng.hpp"

namespace qcland {

namespace {

constexpr double kTinyProb = 1e-12;

void check_distances(const Eigen::MatrixXd& d) {
  if (d.rows() != d.cols()) throw std::invalid_argument("distance matrix must be square");
  for (Eigen::Index i = 0; i < d.rows(); ++i) {
    if (d(i, i) != 0.0) throw std::invalid_argument("distance matrix needs a zero diagonal");
    for (Eigen::Index j = i + 1; j < d.cols(); ++j) {
      if (d(i, j) < 0.0) throw std::invalid_argument("distances must be nonnegative");
      if (std::abs(d(i, j) - d(j, i)) > 1e-9)
        throw std::invalid_argument("distance matrix must be symmetric");
    }
  }
}

/// Shannon entropy (bits) and probabilities of one conditional row for
/// precision beta, p_j ~ exp(-beta d2_j).
double row_entropy(const Eigen::VectorXd& d2, Eigen::Index self, double beta,
                   Eigen::VectorXd& p) {
  double sum = 0.0;
  for (Eigen::Index j = 0; j < d2.size(); ++j) {
    p(j) = j == self ? 0.0 : std::exp(-beta * d2(j));
    sum += p(j);
  }
  if (sum <= 0.0) {  // duplicates at every distance scale: fall back to uniform
    for (Eigen::Index j = 0; j < d2.size(); ++j) p(j) = j == self ? 0.0 : 1.0;
    sum = static_cast<double>(d2.size() - 1);
  }
  double h = 0.0;
  for (Eigen::Index j = 0; j < d2.size(); ++j) {
    p(j) /= sum;
    if (p(j) > 0.0) h -= p(j) * std::log2(p(j));
  }
  return h;
}

}  // namespace

Eigen::MatrixXd perplexity_calibration(const Eigen::MatrixXd& distances,
                                       double perplexity, int* unconverged) {
  check_distances(distances);
  const Eigen::Index n = distances.rows();
  if (n < 3) throw std::invalid_argument("calibration needs at least 3 points");
  if (perplexity <= 1.0 || perplexity >= static_cast<double>(n - 1))
    throw std::invalid_argument("perplexity must satisfy 1 < perplexity < N-1");

  const double target = std::log2(perplexity);
  const Eigen::MatrixXd d2 = distances.array().square();
  Eigen::MatrixXd p(n, n);
  int failures = 0;

  Eigen::VectorXd row(n), d2_row(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    d2_row = d2.row(i).transpose();
    double beta = 1.0, lo = 0.0, hi = std::numeric_limits<double>::infinity();
    double h = row_entropy(d2_row, i, beta, row);
    int steps = 0;
    while (std::abs(h - target) > 1e-5 && steps < 100) {
      if (h > target) {  // too flat: raise precision
        lo = beta;
        beta = std::isinf(hi) ? beta * 2.0 : 0.5 * (beta + hi);
      } else {
        hi = beta;
        beta = lo == 0.0 ? beta / 2.0 : 0.5 * (beta + lo);
      }
      h = row_entropy(d2_row, i, beta, row);
      ++steps;
    }
    if (std::abs(h - target) > 1e-5) ++failures;  // keep the closest achieved row
    p.row(i) = row;
  }
  if (unconverged) *unconverged = failures;
  return p;
}

namespace {

/// One pass over all pairs: Student-t weights, normalization Z, KL against
/// the reference affinities, and optionally the gradient.
struct PairPass {
  double z = 0.0;
  double kl = 0.0;
};

PairPass evaluate(const Eigen::MatrixX2d& y, const Eigen::MatrixXd& p_sym,
                  Eigen::MatrixXd& num, int n_threads) {
  const Eigen::Index n = y.rows();
  PairPass out;
  std::vector<double> z_part(static_cast<std::size_t>(n), 0.0);
  parallel_for(static_cast<std::size_t>(n), n_threads,
               [&](std::size_t begin, std::size_t end) {
                 for (std::size_t ii = begin; ii < end; ++ii) {
                   const Eigen::Index i = static_cast<Eigen::Index>(ii);
                   num(i, i) = 0.0;
                   double acc = 0.0;
                   for (Eigen::Index j = 0; j < n; ++j) {
                     if (j == i) continue;
                     const double dx = y(i, 0) - y(j, 0);
                     const double dy = y(i, 1) - y(j, 1);
                     const double w = 1.0 / (1.0 + dx * dx + dy * dy);
                     num(i, j) = w;
                     acc += w;
                   }
                   z_part[ii] = acc;
                 }
               });
  for (double zp : z_part) out.z += zp;

  double kl = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j == i) continue;
      const double pij = p_sym(i, j);
      if (pij <= 0.0) continue;
      const double qij = std::max(num(i, j) / out.z, kTinyProb);
      kl += pij * std::log(pij / qij);
    }
  out.kl = kl;
  return out;
}

void gradient(const Eigen::MatrixX2d& y, const Eigen::MatrixXd& p_eff,
              const Eigen::MatrixXd& num, double z, Eigen::MatrixX2d& grad,
              int n_threads) {
  const Eigen::Index n = y.rows();
  parallel_for(static_cast<std::size_t>(n), n_threads,
               [&](std::size_t begin, std::size_t end) {
                 for (std::size_t ii = begin; ii < end; ++ii) {
                   const Eigen::Index i = static_cast<Eigen::Index>(ii);
                   double gx = 0.0, gy = 0.0;
                   for (Eigen::Index j = 0; j < n; ++j) {
                     if (j == i) continue;
                     const double w = num(i, j);
                     const double mult = (p_eff(i, j) - w / z) * w;
                     gx += mult * (y(i, 0) - y(j, 0));
                     gy += mult * (y(i, 1) - y(j, 1));
                   }
                   grad(i, 0) = 4.0 * gx;
                   grad(i, 1) = 4.0 * gy;
                 }
               });
}

}  // namespace

EmbeddingResult tsne(const Eigen::MatrixXd& distances, const EmbeddingConfig& config) {
  const Eigen::Index n = distances.rows();
  EmbeddingResult result;
  result.degenerate = n > 0 && distances.maxCoeff() == 0.0;

  Eigen::MatrixXd p_cond =
      perplexity_calibration(distances, config.perplexity, &result.unconverged_rows);
  Eigen::MatrixXd p_sym = (p_cond + p_cond.transpose()) / (2.0 * n);

  Rng rng(derive_seed(config.seed, "tsne-init"));
  Eigen::MatrixX2d y(n, 2);
  for (Eigen::Index i = 0; i < n; ++i) {
    y(i, 0) = 1e-4 * rng.normal();
    y(i, 1) = 1e-4 * rng.normal();
  }

  Eigen::MatrixXd num(n, n);
  Eigen::MatrixX2d grad(n, 2), velocity = Eigen::MatrixX2d::Zero(n, 2);
  Eigen::MatrixX2d gains = Eigen::MatrixX2d::Ones(n, 2);
  const Eigen::MatrixXd p_eff = p_sym * config.exaggeration;

  result.kl_trace.reserve(config.iterations);
  const int momentum_epochs =
      std::max(0, config.iterations - config.final_descent_epochs);
  double lr = config.learning_rate;
  double last_kl = 0.0;

  for (int epoch = 0; epoch < config.iterations; ++epoch) {
    const bool exaggerated = epoch < config.exaggeration_epochs;
    const PairPass pass = evaluate(y, p_sym, num, config.n_threads);
    last_kl = pass.kl;

    if (epoch < momentum_epochs) {
      const Eigen::MatrixXd& p_use = exaggerated ? p_eff : p_sym;
      gradient(y, p_use, num, pass.z, grad, config.n_threads);
      const double momentum = epoch < config.momentum_switch_epoch
                                  ? config.momentum_initial
                                  : config.momentum_final;
      for (Eigen::Index i = 0; i < n; ++i)
        for (int c = 0; c < 2; ++c) {
          const bool same = (grad(i, c) > 0) == (velocity(i, c) > 0);
          gains(i, c) = std::max(0.01, same ? gains(i, c) * 0.8 : gains(i, c) + 0.2);
          velocity(i, c) =
              momentum * velocity(i, c) - lr * gains(i, c) * grad(i, c);
          y(i, c) += velocity(i, c);
        }
      y.rowwise() -= y.colwise().mean();
    } else {
      // backtracking tail: only accept steps that do not raise the KL
      gradient(y, p_sym, num, pass.z, grad, config.n_threads);
      Eigen::MatrixX2d trial;
      double trial_kl = 0.0;
      bool moved = false;
      for (int attempt = 0; attempt < 20; ++attempt) {
        trial = y - lr * grad;
        trial.rowwise() -= trial.colwise().mean();
        trial_kl = evaluate(trial, p_sym, num, config.n_threads).kl;
        if (trial_kl <= pass.kl + 1e-9) {
          moved = true;
          break;
        }
        lr *= 0.5;
      }
      if (moved) {
        y = trial;
        last_kl = trial_kl;
      }
    }
    result.kl_trace.push_back(last_kl);
  }

  result.kl = evaluate(y, p_sym, num, config.n_threads).kl;
  result.points = std::move(y);
  return result;
}

EmbeddingResult tsne_protocols(std::span<const Protocol> protocols,
                               const EmbeddingConfig& config) {
  return tsne(hamming_matrix(protocols), config);
}

}  // namespace qcland
