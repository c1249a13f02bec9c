#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "qcland/control_problem.hpp"

namespace qcland {

/// Dense matrix of the chain Hamiltonian at a fixed control field:
///   H = -sum_i [ J S^z_{i+1} S^z_i + g S^z_i + h S^x_i ]
/// with periodic wrap i = L -> 1. Every ordered bond (i, i+1 mod L)
/// contributes once, so the L = 2 chain counts its single pair twice.
/// Basis: index bit i (LSB = site 0) clear means S^z_i = +1 (up).
Eigen::MatrixXd build_hamiltonian(const ControlProblem& problem, double field);

struct GroundState {
  double energy = 0.0;
  Eigen::VectorXcd state;  // normalized, first nonzero amplitude real positive
  bool degenerate = false;  // spectral gap below 1e-10
};

GroundState ground_state(const ControlProblem& problem, double field);

/// Exact one-step unitaries exp(-i dt H[+-h_max]) from the spectral
/// decomposition of the step Hamiltonians.
struct StepPropagators {
  Eigen::MatrixXcd u_plus;
  Eigen::MatrixXcd u_minus;
};

StepPropagators step_propagators(const ControlProblem& problem);

struct CostValue {
  double value = 0.0;
  bool capped = false;  // fidelity underflowed to <= 0, value is the cap
};

/// C = -ln(F)/L; a vanishing fidelity yields the cap instead of infinity.
CostValue log_fidelity_cost(double fidelity, int n_sites, double cost_cap = 1e6);

/// Prepares a control problem for repeated protocol evaluation: end-point
/// ground states, cached step propagators and, when possible, a projection
/// into the translation+reflection symmetric sector (the end states live
/// there whenever they are unique, and the reduced dimension is far below
/// 2^L). All members are immutable after construction and safe to share
/// across threads.
struct EvaluatorOptions {
  bool use_symmetry = true;
  double cost_cap = 1e6;
};

class FidelityEvaluator {
 public:
  using Options = EvaluatorOptions;

  explicit FidelityEvaluator(const ControlProblem& problem, Options options = Options());

  const ControlProblem& problem() const { return problem_; }
  const GroundState& initial_state() const { return initial_; }
  const GroundState& target_state() const { return target_; }

  /// psi(T) = U_{sigma_N} ... U_{sigma_1} psi_init as a full 2^L vector.
  Eigen::VectorXcd evolve(const Protocol& protocol) const;

  /// F = |<psi_target | evolve(protocol)>|^2, clamped to [0, 1].
  double fidelity(const Protocol& protocol) const;

  double cost(const Protocol& protocol) const;
  double cost_from_fidelity(double fidelity) const;
  double cost_cap() const { return options_.cost_cap; }

  bool symmetry_reduced() const { return reduced_; }
  int working_dim() const { return static_cast<int>(initial_vec_.size()); }

  /// Working-basis quantities (sector coordinates when reduced, otherwise
  /// the full basis); used by the incremental evaluator and enumeration.
  const Eigen::MatrixXcd& step(std::int8_t bang) const {
    return bang > 0 ? step_plus_ : step_minus_;
  }
  const Eigen::MatrixXcd& step_dagger(std::int8_t bang) const {
    return bang > 0 ? step_plus_dag_ : step_minus_dag_;
  }
  const Eigen::VectorXcd& initial_vec() const { return initial_vec_; }
  const Eigen::VectorXcd& target_vec() const { return target_vec_; }

 private:
  Eigen::VectorXcd evolve_working(const Protocol& protocol) const;

  ControlProblem problem_;
  Options options_;
  GroundState initial_;
  GroundState target_;
  bool reduced_ = false;
  Eigen::MatrixXd sector_basis_;  // 2^L x d, orthonormal columns; empty if not reduced
  Eigen::MatrixXcd step_plus_, step_minus_;
  Eigen::MatrixXcd step_plus_dag_, step_minus_dag_;
  Eigen::VectorXcd initial_vec_, target_vec_;
};

/// Incremental fidelity re-evaluation for k-flip updates of a reference
/// protocol. Keeps prefix states, suffix states and lazily extended
/// flipped-prefix rows so a 1-flip trial is a dot product and a 2-flip
/// trial costs at most the gap between the two flip positions in step
/// applications. Owns mutable state: one instance per descent chain.
class DeltaFidelityEvaluator {
 public:
  explicit DeltaFidelityEvaluator(const FidelityEvaluator& eval);

  void reset(const Protocol& protocol);
  const Protocol& protocol() const { return protocol_; }
  double current_fidelity() const { return current_fidelity_; }
  double current_cost() const;

  /// Fidelity of the protocol with the given distinct positions flipped;
  /// the reference protocol is left unchanged. Positions need not be sorted.
  double fidelity_after_flips(std::span<const std::uint16_t> positions);

  /// Commits the flips and refreshes the caches.
  void accept(std::span<const std::uint16_t> positions);

 private:
  void rebuild(int first, int last);  // refresh caches for bangs in [first, last]
  const Eigen::VectorXcd& flipped_row(int p, int upto);

  const FidelityEvaluator* eval_;
  int n_ = 0;
  Protocol protocol_;
  double current_fidelity_ = 0.0;
  std::vector<Eigen::VectorXcd> fwd_;    // fwd_[j]: after bangs [0, j)
  std::vector<Eigen::VectorXcd> back_;   // back_[j]: suffix [j, n) pulled back from target
  std::vector<Eigen::VectorXcd> wflip_;  // wflip_[p] = Ubar_p^dag back_[p+1]
  std::vector<std::vector<Eigen::VectorXcd>> rows_;  // rows_[p][i]: flip at p, after bangs [0, p+i]
  Eigen::VectorXcd scratch_;
  std::vector<std::uint16_t> sorted_;
};

}  // namespace qcland
