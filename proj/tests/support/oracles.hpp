#pragma once

#include <Eigen/Dense>

#include "qcland/control_problem.hpp"
#include "qcland/quantum.hpp"

// Independent reference implementations used only by tests. Each one
// deliberately avoids the code path it checks: the integrator never touches
// matrix exponentials or propagator caches, the eigensolver is hand-rolled
// Jacobi, the exponential is Taylor with scaling and squaring.
namespace qcland::oracles {

/// Adaptive Dormand-Prince (RK45) integration of the piecewise-constant
/// Schrodinger equation d/dt psi = -i H(sigma_j) psi across all bangs.
Eigen::VectorXcd rk45_evolve(const ControlProblem& problem, const Protocol& protocol,
                             double rtol = 1e-12, double atol = 1e-12);

/// Lowest eigenvalue of a real symmetric matrix by cyclic Jacobi rotations.
double jacobi_lowest_eigenvalue(Eigen::MatrixXd a);

/// exp(m) by Taylor series with scaling and squaring.
Eigen::MatrixXcd expm_scaling_squaring(const Eigen::MatrixXcd& m);

/// Cost table by plain per-protocol evolution, one chain of N_T products
/// per protocol (the slow second pass for enumeration cross-checks).
std::vector<double> naive_cost_table(const FidelityEvaluator& eval);

}  // namespace qcland::oracles
