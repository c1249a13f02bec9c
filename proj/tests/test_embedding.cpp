#include <doctest.h>

#include <cmath>
#include <map>

#include "qcland/density_clustering.hpp"
#include "qcland/landscape_stats.hpp"
#include "qcland/rng.hpp"
#include "qcland/tsne.hpp"

using namespace qcland;

namespace {

/// Gaussian blobs in d dimensions around the given centers; returns the
/// Euclidean distance matrix and ground-truth labels.
struct Blobs {
  Eigen::MatrixXd distances;
  std::vector<int> labels;
  Eigen::MatrixXd points;
};

Blobs make_blobs(const std::vector<Eigen::VectorXd>& centers, int per_blob, double sigma,
                 std::uint64_t seed) {
  Rng rng(seed);
  const int dim = static_cast<int>(centers[0].size());
  const int n = per_blob * static_cast<int>(centers.size());
  Blobs out;
  out.points.resize(n, dim);
  out.labels.resize(n);
  int row = 0;
  for (std::size_t b = 0; b < centers.size(); ++b) {
    for (int i = 0; i < per_blob; ++i, ++row) {
      out.labels[row] = static_cast<int>(b);
      for (int c = 0; c < dim; ++c)
        out.points(row, c) = centers[b](c) + sigma * rng.normal();
    }
  }
  out.distances = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double d = (out.points.row(i) - out.points.row(j)).norm();
      out.distances(i, j) = d;
      out.distances(j, i) = d;
    }
  return out;
}

double label_purity(const std::vector<int>& truth, const std::vector<int>& found) {
  std::map<std::pair<int, int>, int> confusion;
  for (std::size_t i = 0; i < truth.size(); ++i) ++confusion[{found[i], truth[i]}];
  std::map<int, int> best;
  for (const auto& [key, count] : confusion)
    best[key.first] = std::max(best[key.first], count);
  int agree = 0;
  for (const auto& [cluster, count] : best) agree += count;
  return static_cast<double>(agree) / truth.size();
}

}  // namespace

TEST_SUITE("embedding") {

TEST_CASE("equidistant points get uniform affinity rows") {
  Eigen::MatrixXd d = Eigen::MatrixXd::Constant(4, 4, 1.0);
  d.diagonal().setZero();
  const Eigen::MatrixXd p = perplexity_calibration(d, 2.5);
  for (int i = 0; i < 4; ++i) {
    CHECK(p(i, i) == 0.0);
    for (int j = 0; j < 4; ++j)
      if (j != i) CHECK(p(i, j) == doctest::Approx(1.0 / 3).epsilon(1e-9));
  }
}

TEST_CASE("affinity rows are probability distributions") {
  const Blobs blobs = make_blobs({Eigen::VectorXd::Zero(5),
                                  Eigen::VectorXd::Constant(5, 4.0)},
                                 15, 1.0, 3);
  int unconverged = 0;
  const Eigen::MatrixXd p = perplexity_calibration(blobs.distances, 8.0, &unconverged);
  CHECK(unconverged == 0);
  for (int i = 0; i < p.rows(); ++i)
    CHECK(p.row(i).sum() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("near neighbours dominate the calibrated affinities") {
  // point 0 has three neighbours at distance 1 and eight at distance 10
  const int n = 12;
  Eigen::MatrixXd d = Eigen::MatrixXd::Constant(n, n, 10.0);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) d(i, j) = i == j ? 0.0 : 1.0;
  for (int i = 4; i < n; ++i)
    for (int j = 4; j < n; ++j) d(i, j) = i == j ? 0.0 : 1.0;
  const Eigen::MatrixXd p = perplexity_calibration(d, 3.0);
  CHECK(p(0, 1) >= 10.0 * p(0, 5));
}

TEST_CASE("invalid perplexity and malformed matrices are rejected") {
  Eigen::MatrixXd d = Eigen::MatrixXd::Constant(5, 5, 1.0);
  d.diagonal().setZero();
  CHECK_THROWS_AS(perplexity_calibration(d, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(perplexity_calibration(d, 4.5), std::invalid_argument);
  Eigen::MatrixXd asym = d;
  asym(0, 1) = 2.0;
  CHECK_THROWS_AS(perplexity_calibration(asym, 2.0), std::invalid_argument);
}

TEST_CASE("well-separated blobs embed linearly separable") {
  const int dim = 20;
  Eigen::VectorXd c0 = Eigen::VectorXd::Zero(dim);
  Eigen::VectorXd c1 = Eigen::VectorXd::Zero(dim);
  c1(0) = 10.0 * std::sqrt(2.0 * dim);  // 10x the typical intra-blob distance
  const Blobs blobs = make_blobs({c0, c1}, 50, 1.0, 7);

  EmbeddingConfig config;
  config.perplexity = 20;
  config.iterations = 500;
  config.exaggeration_epochs = 100;
  config.momentum_switch_epoch = 100;
  config.seed = 5;
  const EmbeddingResult emb = tsne(blobs.distances, config);
  CHECK(emb.points.allFinite());
  CHECK(emb.kl >= 0.0);

  Eigen::RowVector2d m0 = Eigen::RowVector2d::Zero(), m1 = Eigen::RowVector2d::Zero();
  for (int i = 0; i < 50; ++i) m0 += emb.points.row(i);
  for (int i = 50; i < 100; ++i) m1 += emb.points.row(i);
  m0 /= 50;
  m1 /= 50;
  double radius = 0.0;
  for (int i = 0; i < 100; ++i)
    radius += (emb.points.row(i) - (i < 50 ? m0 : m1)).norm();
  radius /= 100;
  CHECK((m0 - m1).norm() / radius >= 3.0);

  // KL is nonincreasing over the backtracking tail
  const int tail = config.final_descent_epochs;
  for (std::size_t e = emb.kl_trace.size() - tail + 1; e < emb.kl_trace.size(); ++e)
    CHECK(emb.kl_trace[e] <= emb.kl_trace[e - 1] + 1e-6);
}

TEST_CASE("the embedding is deterministic and input-representation invariant") {
  Rng rng(13);
  std::vector<Protocol> protocols;
  for (int i = 0; i < 40; ++i) protocols.push_back(random_protocol(24, rng));
  EmbeddingConfig config;
  config.perplexity = 10;
  config.iterations = 120;
  config.exaggeration_epochs = 40;
  config.momentum_switch_epoch = 40;
  config.final_descent_epochs = 30;
  config.seed = 77;
  const EmbeddingResult a = tsne_protocols(protocols, config);
  const EmbeddingResult b = tsne(hamming_matrix(protocols), config);
  CHECK((a.points - b.points).cwiseAbs().maxCoeff() == 0.0);
  CHECK(a.kl == b.kl);
  const EmbeddingResult c = tsne_protocols(protocols, config);
  CHECK((a.points - c.points).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("identical inputs collapse with a warning flag") {
  std::vector<Protocol> protocols(12, Protocol{1, -1, 1, 1});
  EmbeddingConfig config;
  config.perplexity = 5;
  config.iterations = 50;
  config.exaggeration_epochs = 10;
  config.final_descent_epochs = 10;
  const EmbeddingResult emb = tsne_protocols(protocols, config);
  CHECK(emb.degenerate);
  CHECK(emb.points.allFinite());
}

TEST_CASE("a single tight blob forms one cluster around the densest point") {
  const Blobs blob = make_blobs({Eigen::VectorXd::Zero(2)}, 40, 0.5, 21);
  const ClusterAssignment a = density_peak_cluster(blob.distances, {});
  CHECK(a.n_clusters() == 1);
  for (int label : a.labels) CHECK(label == 0);
  // the center is the point of maximal density
  double best_rho = -1.0;
  for (double r : a.rho) best_rho = std::max(best_rho, r);
  CHECK(a.rho[a.centers[0]] == best_rho);
}

TEST_CASE("three planted blobs are recovered with full purity") {
  Eigen::VectorXd c0 = Eigen::VectorXd::Zero(2), c1 = c0, c2 = c0;
  c1(0) = 20.0;
  c2(1) = 20.0;
  const Blobs blobs = make_blobs({c0, c1, c2}, 30, 1.0, 9);
  const ClusterAssignment a = density_peak_cluster(blobs.distances, {});
  CHECK(a.n_clusters() == 3);
  CHECK(label_purity(blobs.labels, a.labels) == 1.0);
}

TEST_CASE("clustering is deterministic under density ties") {
  // a grid with exact duplicates: identical rho values everywhere
  Eigen::MatrixX2d points(6, 2);
  points << 0, 0, 0, 0, 5, 5, 5, 5, 10, 0, 10, 0;
  ClusterConfig config;
  config.dc = 2.0;
  const ClusterAssignment a = density_peak_cluster_points(points, config);
  const ClusterAssignment b = density_peak_cluster_points(points, config);
  CHECK(a.labels == b.labels);
  CHECK(a.centers == b.centers);
}

TEST_CASE("an explicit nonpositive cutoff is rejected") {
  Eigen::MatrixXd d = Eigen::MatrixXd::Constant(3, 3, 1.0);
  d.diagonal().setZero();
  ClusterConfig config;
  config.dc = 0.0;
  CHECK_THROWS_AS(density_peak_cluster(d, config), std::invalid_argument);
}

TEST_CASE("manual center count overrides the knee") {
  const Blobs blobs = make_blobs({Eigen::VectorXd::Zero(2),
                                  Eigen::VectorXd::Constant(2, 15.0)},
                                 20, 1.0, 33);
  ClusterConfig config;
  config.n_centers = 4;
  CHECK(density_peak_cluster(blobs.distances, config).n_clusters() == 4);
}

TEST_CASE("complementary constant protocols: inter distance one, intra zero") {
  std::vector<Protocol> protocols;
  for (int i = 0; i < 6; ++i) protocols.push_back(Protocol(8, 1));
  for (int i = 0; i < 6; ++i) protocols.push_back(Protocol(8, -1));
  const Eigen::MatrixXd hamming = hamming_matrix(protocols);
  ClusterAssignment assignment;
  assignment.labels = {0, 0, 0, 0, 0, 0, 1, 1, 1, 1, 1, 1};
  assignment.centers = {0, 6};
  assignment.rho.assign(12, 1.0);
  assignment.delta.assign(12, 0.0);
  const Eigen::MatrixXd mean = mean_intercluster_distance(assignment, hamming);
  CHECK(mean(0, 0) == 0.0);
  CHECK(mean(1, 1) == 0.0);
  CHECK(mean(0, 1) == 1.0);
  CHECK(mean(1, 0) == 1.0);
}

TEST_CASE("a single cluster yields a one-by-one intra matrix") {
  std::vector<Protocol> protocols{Protocol{1, 1, -1, -1}, Protocol{1, 1, 1, -1}};
  ClusterAssignment assignment;
  assignment.labels = {0, 0};
  assignment.centers = {0};
  assignment.rho.assign(2, 1.0);
  assignment.delta.assign(2, 0.0);
  const Eigen::MatrixXd mean =
      mean_intercluster_distance(assignment, hamming_matrix(protocols));
  CHECK(mean.rows() == 1);
  CHECK(mean(0, 0) == doctest::Approx(0.25));
}

TEST_CASE("singleton clusters are flagged with zero intra distance") {
  std::vector<Protocol> protocols{Protocol{1, 1}, Protocol{-1, -1}, Protocol{-1, 1}};
  ClusterAssignment assignment;
  assignment.labels = {0, 1, 1};
  assignment.centers = {0, 1};
  assignment.rho.assign(3, 1.0);
  assignment.delta.assign(3, 0.0);
  std::vector<int> singletons;
  const Eigen::MatrixXd mean = mean_intercluster_distance(
      assignment, hamming_matrix(protocols), &singletons);
  CHECK(mean(0, 0) == 0.0);
  CHECK(singletons == std::vector<int>{0});
}

}  // TEST_SUITE
