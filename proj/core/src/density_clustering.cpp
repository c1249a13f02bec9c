#include "qcland/density_clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace qcland {

namespace {

double quantile_pair_distance(const Eigen::MatrixXd& d, double q) {
  std::vector<double> pairs;
  const Eigen::Index n = d.rows();
  pairs.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) pairs.push_back(d(i, j));
  if (pairs.empty()) return 0.0;
  std::sort(pairs.begin(), pairs.end());
  const auto pos = static_cast<std::size_t>(
      std::clamp(q, 0.0, 1.0) * static_cast<double>(pairs.size() - 1));
  return pairs[pos];
}

}  // namespace

ClusterAssignment density_peak_cluster(const Eigen::MatrixXd& distances,
                                       const ClusterConfig& config) {
  const Eigen::Index n = distances.rows();
  if (n < 1 || distances.cols() != n)
    throw std::invalid_argument("clustering needs a square nonempty distance matrix");

  ClusterAssignment out;
  out.dc = config.dc.value_or(quantile_pair_distance(distances, config.dc_quantile));
  if (out.dc <= 0.0 && config.dc)
    throw std::invalid_argument("density cutoff d_c must be positive");

  out.rho.assign(n, 0.0);
  for (Eigen::Index i = 0; i < n; ++i) {
    int count = 0;
    for (Eigen::Index j = 0; j < n; ++j)
      if (j != i && distances(i, j) < out.dc) ++count;
    out.rho[i] = static_cast<double>(count);
  }

  // rank by density, ties by index; delta against earlier-ranked points
  std::vector<int> rank(n);
  std::iota(rank.begin(), rank.end(), 0);
  std::sort(rank.begin(), rank.end(), [&](int a, int b) {
    return out.rho[a] != out.rho[b] ? out.rho[a] > out.rho[b] : a < b;
  });

  out.delta.assign(n, 0.0);
  std::vector<int> nearest_denser(n, -1);
  for (std::size_t r = 0; r < rank.size(); ++r) {
    const int i = rank[r];
    if (r == 0) {
      out.delta[i] = distances.row(i).maxCoeff();
      continue;
    }
    double best = std::numeric_limits<double>::infinity();
    int arg = -1;
    for (std::size_t s = 0; s < r; ++s) {
      const int j = rank[s];
      if (distances(i, j) < best) {
        best = distances(i, j);
        arg = j;
      }
    }
    out.delta[i] = best;
    nearest_denser[i] = arg;
  }

  // centers by gamma = rho * delta
  std::vector<int> by_gamma(n);
  std::iota(by_gamma.begin(), by_gamma.end(), 0);
  std::vector<double> gamma(n);
  for (Eigen::Index i = 0; i < n; ++i) gamma[i] = out.rho[i] * out.delta[i];
  std::sort(by_gamma.begin(), by_gamma.end(), [&](int a, int b) {
    return gamma[a] != gamma[b] ? gamma[a] > gamma[b] : a < b;
  });

  int k = 1;
  if (config.n_centers) {
    k = std::clamp(*config.n_centers, 1, static_cast<int>(n));
  } else {
    // knee of the sorted gamma sequence: the largest relative drop among
    // candidates whose gamma is still a visible fraction of the top value
    // (the far tail decays through zero and would dominate otherwise)
    const int limit = std::min<int>(config.max_centers, static_cast<int>(n) - 1);
    const double top = gamma[by_gamma[0]];
    const double floor = 0.01 * top;
    const double eps = 1e-12 + 1e-9 * top;
    double best_ratio = -1.0;
    for (int i = 1; i <= limit && gamma[by_gamma[i - 1]] >= floor; ++i) {
      const double ratio = (gamma[by_gamma[i - 1]] + eps) / (gamma[by_gamma[i]] + eps);
      if (ratio > best_ratio) {
        best_ratio = ratio;
        k = i;
      }
    }
  }

  out.centers.assign(by_gamma.begin(), by_gamma.begin() + k);
  std::sort(out.centers.begin(), out.centers.end(), [&](int a, int b) {
    return gamma[a] != gamma[b] ? gamma[a] > gamma[b] : a < b;
  });

  out.labels.assign(n, -1);
  for (int c = 0; c < k; ++c) out.labels[out.centers[c]] = c;
  for (std::size_t r = 0; r < rank.size(); ++r) {
    const int i = rank[r];
    if (out.labels[i] >= 0) continue;
    if (nearest_denser[i] >= 0) {
      out.labels[i] = out.labels[nearest_denser[i]];
    } else {
      // densest point was not selected as a center: attach to nearest center
      double best = std::numeric_limits<double>::infinity();
      for (int c : out.centers)
        if (distances(i, c) < best) {
          best = distances(i, c);
          out.labels[i] = out.labels[c];
        }
    }
  }

  if (config.halo && k > 1) {
    std::vector<double> border(k, 0.0);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = i + 1; j < n; ++j) {
        if (out.labels[i] == out.labels[j] || distances(i, j) >= out.dc) continue;
        const double avg = 0.5 * (out.rho[i] + out.rho[j]);
        border[out.labels[i]] = std::max(border[out.labels[i]], avg);
        border[out.labels[j]] = std::max(border[out.labels[j]], avg);
      }
    for (Eigen::Index i = 0; i < n; ++i)
      if (out.rho[i] < border[out.labels[i]]) out.labels[i] = -1;
  }
  return out;
}

ClusterAssignment density_peak_cluster_points(const Eigen::MatrixX2d& points,
                                              const ClusterConfig& config) {
  const Eigen::Index n = points.rows();
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double dist = (points.row(i) - points.row(j)).norm();
      d(i, j) = dist;
      d(j, i) = dist;
    }
  return density_peak_cluster(d, config);
}

Eigen::MatrixXd mean_intercluster_distance(const ClusterAssignment& assignment,
                                           const Eigen::MatrixXd& distances,
                                           std::vector<int>* singleton_clusters) {
  const int k = assignment.n_clusters();
  if (k < 1) throw std::invalid_argument("need at least one cluster");
  if (distances.rows() != static_cast<Eigen::Index>(assignment.labels.size()))
    throw std::invalid_argument("distance matrix and labels disagree in size");

  Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, k);
  Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(k, k);
  const Eigen::Index n = distances.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    const int a = assignment.labels[i];
    if (a < 0) continue;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const int b = assignment.labels[j];
      if (b < 0) continue;
      sums(a, b) += distances(i, j);
      counts(a, b) += 1.0;
      if (a != b) {
        sums(b, a) += distances(i, j);
        counts(b, a) += 1.0;
      }
    }
  }
  Eigen::MatrixXd mean = Eigen::MatrixXd::Zero(k, k);
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b)
      if (counts(a, b) > 0) mean(a, b) = sums(a, b) / counts(a, b);
  if (singleton_clusters) {
    singleton_clusters->clear();
    for (int a = 0; a < k; ++a)
      if (counts(a, a) == 0) singleton_clusters->push_back(a);
  }
  return mean;
}

}  // namespace qcland
