#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

namespace qcland {

struct ClusterConfig {
  std::optional<double> dc;      // density cutoff; default: quantile of pair distances
  double dc_quantile = 0.02;
  std::optional<int> n_centers;  // manual override; default: knee of the sorted gamma
  int max_centers = 50;
  bool halo = false;             // when on, low-density border points get label -1
};

struct ClusterAssignment {
  std::vector<int> labels;   // cluster id per point, -1 for halo
  std::vector<int> centers;  // point indices, one per cluster, ordered by label
  std::vector<double> rho;   // local density (neighbours within dc)
  std::vector<double> delta; // distance to the nearest denser point
  double dc = 0.0;

  int n_clusters() const { return static_cast<int>(centers.size()); }
};

/// Density-peaks clustering: rho_i counts neighbours within dc, delta_i is
/// the distance to the nearest point of higher density (the densest point
/// gets its row maximum), centers are the top points by gamma = rho*delta,
/// and every remaining point inherits the label of its nearest denser
/// neighbour in decreasing-density order. Deterministic; density ties are
/// broken by index.
ClusterAssignment density_peak_cluster(const Eigen::MatrixXd& distances,
                                       const ClusterConfig& config = {});

/// Convenience overload for 2-D embeddings (Euclidean distances).
ClusterAssignment density_peak_cluster_points(const Eigen::MatrixX2d& points,
                                              const ClusterConfig& config = {});

/// Cluster-pair matrix of mean distances in the ORIGINAL space: entry
/// (a, b) averages cross pairs, the diagonal averages within-cluster
/// pairs. Singleton clusters get an intra entry of 0 and are reported.
Eigen::MatrixXd mean_intercluster_distance(const ClusterAssignment& assignment,
                                           const Eigen::MatrixXd& distances,
                                           std::vector<int>* singleton_clusters = nullptr);

}  // namespace qcland
