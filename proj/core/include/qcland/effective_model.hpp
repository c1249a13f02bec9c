#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "qcland/control_problem.hpp"

namespace qcland {

/// In-place Walsh-Hadamard butterfly (unnormalized, involutive up to 2^n):
/// out[m] = sum_s in[s] * (-1)^popcount(m & s). Size must be a power of two.
void fwht_inplace(std::span<double> data);

/// Multilinear expansion of a function on {-1,+1}^n:
///   C(sigma) = sum_masks c_m * prod_{j in m} sigma_j,
/// with sigma_j read off table indices as bit j clear -> +1, set -> -1
/// (the protocol_index convention). Coefficients are stored for every
/// mask; the constant, field, pair and triple accessors expose the
/// order-0..3 slices. Each pair/triple value applies once per unordered
/// index set when evaluating energies.
class CouplingTable {
 public:
  CouplingTable() = default;
  CouplingTable(int n_bangs, std::vector<double> coefficients);

  int n_bangs() const { return n_; }
  const std::vector<double>& coefficients() const { return coeff_; }

  double constant() const { return coeff_[0]; }
  double field(int j) const { return coeff_[std::uint64_t{1} << j]; }
  double pair(int i, int j) const {
    return coeff_[(std::uint64_t{1} << i) | (std::uint64_t{1} << j)];
  }
  double triple(int i, int j, int k) const {
    return coeff_[(std::uint64_t{1} << i) | (std::uint64_t{1} << j) |
                  (std::uint64_t{1} << k)];
  }

  Eigen::VectorXd field_vector() const;
  Eigen::MatrixXd pair_matrix() const;  // symmetric, zero diagonal

  struct Triple {
    std::array<int, 3> sites;
    double value;
  };
  std::vector<Triple> triples() const;

 private:
  int n_ = 0;
  std::vector<double> coeff_;
};

/// Exact couplings from a full 2^N_T cost table via the fast transform,
/// O(N_T 2^N_T). Throws if the table length is not a power of two.
CouplingTable walsh_couplings(std::span<const double> cost_table);

/// Builds a table from explicit low-order terms (higher orders zero).
CouplingTable coupling_table_from_terms(
    int n_bangs, double constant, const Eigen::VectorXd& field,
    const Eigen::MatrixXd& pair,
    std::span<const CouplingTable::Triple> triples = {});

/// Spectrum of the model truncated to the given interaction orders,
/// evaluated on all 2^n states by the inverse transform.
std::vector<double> truncated_spectrum(const CouplingTable& table,
                                       std::span<const int> orders);

/// Energy of one protocol under the truncated model.
double truncated_energy(const CouplingTable& table, std::span<const int> orders,
                        const Protocol& protocol);

/// Mean absolute spectrum error of the truncation:
/// E = 2^-n sum_s |C_s - C_s^approx|.
double truncation_error(std::span<const double> cost_table, const CouplingTable& table,
                        std::span<const int> orders);

/// Frustration of the truncated model (constant term excluded):
/// Phi = (min_s C^(orders)_s + sum |c|) / sum |c|, in [0, 1]; 0 iff the
/// termwise minima are simultaneously achievable. Orders must not contain
/// 0; an all-zero coupling set is rejected.
double frustration(const CouplingTable& table, std::span<const int> orders);

/// Mean |three-body coupling| grouped by the triangle perimeter
/// |i-j| + |j-k| + |k-i| of the interacting sites.
struct LocalityCurve {
  std::vector<int> perimeter;
  std::vector<double> mean_abs;
  std::vector<std::int64_t> count;
};
LocalityCurve three_body_locality(const CouplingTable& table);

/// Per-order averaging of the cost table against products of the physical
/// field values h = +-field_bound, with 1/o! and N_T^(o-1) factors:
///   constant = 2^-n sum_s C_s
///   field_j  = (1/1!) 2^-n sum_s C_s h_j
///   pair_ij  = (N_T/2!) 2^-n sum_s C_s h_i h_j
///   triple   = (N_T^2/3!) 2^-n sum_s C_s h_i h_j h_k
/// Direct summation, O(n^3 2^n): a slow second route kept as a cross-check
/// against the transform (they agree after convention conversion).
struct AveragedCouplings {
  double constant = 0.0;
  Eigen::VectorXd field;
  Eigen::MatrixXd pair;
  std::vector<CouplingTable::Triple> triples;
};
AveragedCouplings averaged_couplings(std::span<const double> cost_table, int n_bangs,
                                     double field_bound);

}  // namespace qcland
