#include "qcland/quantum.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qcland {

namespace {

using Complex = std::complex<double>;

void require_buildable(const ControlProblem& problem) {
  if (problem.n_sites < 2) throw std::invalid_argument("chain needs at least 2 sites");
  if (problem.n_sites > problem.max_sites)
    throw std::invalid_argument("2^L dense matrices exceed the configured cap (L <= " +
                                std::to_string(problem.max_sites) + ")");
}

/// exp(-i dt H) for Hermitian (real symmetric) H via spectral decomposition.
Eigen::MatrixXcd unitary_exp(const Eigen::MatrixXd& hamiltonian, double dt) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hamiltonian);
  const Eigen::MatrixXd& v = es.eigenvectors();
  Eigen::VectorXcd phases(v.cols());
  for (Eigen::Index k = 0; k < v.cols(); ++k) {
    const double a = -dt * es.eigenvalues()(k);
    phases(k) = Complex(std::cos(a), std::sin(a));
  }
  Eigen::MatrixXcd half = v.cast<Complex>() * phases.asDiagonal();
  return half * v.transpose().cast<Complex>();
}

void fix_phase(Eigen::VectorXcd& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) > 1e-12) {
      v *= std::conj(v(i)) / std::abs(v(i));
      return;
    }
  }
}

int bit(std::uint64_t s, int i) { return static_cast<int>((s >> i) & 1u); }

}  // namespace

Eigen::MatrixXd build_hamiltonian(const ControlProblem& problem, double field) {
  require_buildable(problem);
  const int l = problem.n_sites;
  const long dim = problem.dim();
  const bool pauli = problem.convention == SpinConvention::pauli;
  const double zmag = pauli ? 1.0 : 0.5;   // |S^z| eigenvalue
  const double xoff = pauli ? 1.0 : 0.5;   // S^x matrix element
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
  for (long s = 0; s < dim; ++s) {
    double diag = 0.0;
    for (int i = 0; i < l; ++i) {
      const double zi = bit(s, i) ? -zmag : zmag;
      const double zn = bit(s, (i + 1) % l) ? -zmag : zmag;
      diag += problem.coupling * zn * zi + problem.field_z * zi;
    }
    h(s, s) = -diag;
    for (int i = 0; i < l; ++i) h(s ^ (1L << i), s) -= field * xoff;
  }
  return h;
}

GroundState ground_state(const ControlProblem& problem, double field) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(build_hamiltonian(problem, field));
  GroundState gs;
  gs.energy = es.eigenvalues()(0);
  gs.state = es.eigenvectors().col(0).cast<Complex>();
  fix_phase(gs.state);
  gs.degenerate = es.eigenvalues().size() > 1 && es.eigenvalues()(1) - gs.energy < 1e-10;
  return gs;
}

StepPropagators step_propagators(const ControlProblem& problem) {
  const double dt = problem.dt();
  return StepPropagators{
      unitary_exp(build_hamiltonian(problem, problem.field_bound), dt),
      unitary_exp(build_hamiltonian(problem, -problem.field_bound), dt)};
}

CostValue log_fidelity_cost(double fidelity, int n_sites, double cost_cap) {
  if (!(fidelity > 0.0)) return {cost_cap, true};
  return {std::max(0.0, -std::log(fidelity) / n_sites), false};
}

FidelityEvaluator::FidelityEvaluator(const ControlProblem& problem, Options options)
    : problem_(problem), options_(options) {
  auto violations = problem.validate();
  if (!violations.empty()) {
    std::string msg = "invalid control problem:";
    for (const auto& v : violations) msg += " " + v + ";";
    throw std::invalid_argument(msg);
  }
  initial_ = ground_state(problem, problem.field_initial);
  target_ = ground_state(problem, problem.field_target);

  const long dim = problem.dim();
  const int l = problem.n_sites;

  if (options.use_symmetry && !initial_.degenerate && !target_.degenerate) {
    // Projector onto the sector invariant under translations and reflection.
    std::vector<long> translate(dim), reflect(dim);
    for (long s = 0; s < dim; ++s) {
      long t = 0, r = 0;
      for (int i = 0; i < l; ++i) {
        if (bit(s, i)) {
          t |= 1L << ((i + 1) % l);
          r |= 1L << (l - 1 - i);
        }
      }
      translate[s] = t;
      reflect[s] = r;
    }
    Eigen::MatrixXd proj = Eigen::MatrixXd::Zero(dim, dim);
    const double w = 1.0 / (2.0 * l);
    for (long s = 0; s < dim; ++s) {
      long g = s;
      for (int t = 0; t < l; ++t) {
        proj(g, s) += w;
        proj(reflect[g], s) += w;
        g = translate[g];
      }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(proj);
    int rank = 0;
    for (Eigen::Index k = 0; k < dim; ++k)
      if (es.eigenvalues()(k) > 0.5) ++rank;
    Eigen::MatrixXd basis = es.eigenvectors().rightCols(rank);

    const Eigen::VectorXd init_re = initial_.state.real();
    const Eigen::VectorXd targ_re = target_.state.real();
    const double res_i = (init_re - basis * (basis.transpose() * init_re)).norm() +
                         initial_.state.imag().norm();
    const double res_t = (targ_re - basis * (basis.transpose() * targ_re)).norm() +
                         target_.state.imag().norm();
    if (res_i <= 1e-10 && res_t <= 1e-10) {
      reduced_ = true;
      sector_basis_ = std::move(basis);
      const Eigen::MatrixXd h_plus =
          sector_basis_.transpose() *
          build_hamiltonian(problem, problem.field_bound) * sector_basis_;
      const Eigen::MatrixXd h_minus =
          sector_basis_.transpose() *
          build_hamiltonian(problem, -problem.field_bound) * sector_basis_;
      step_plus_ = unitary_exp(h_plus, problem.dt());
      step_minus_ = unitary_exp(h_minus, problem.dt());
      initial_vec_ = (sector_basis_.transpose() * init_re).cast<Complex>();
      target_vec_ = (sector_basis_.transpose() * targ_re).cast<Complex>();
    }
  }
  if (!reduced_) {
    StepPropagators props = step_propagators(problem);
    step_plus_ = std::move(props.u_plus);
    step_minus_ = std::move(props.u_minus);
    initial_vec_ = initial_.state;
    target_vec_ = target_.state;
  }
  step_plus_dag_ = step_plus_.adjoint();
  step_minus_dag_ = step_minus_.adjoint();
}

Eigen::VectorXcd FidelityEvaluator::evolve_working(const Protocol& protocol) const {
  if (static_cast<int>(protocol.size()) != problem_.n_bangs)
    throw std::invalid_argument("protocol length does not match N_T");
  Eigen::VectorXcd v = initial_vec_;
  Eigen::VectorXcd tmp(v.size());
  for (auto bang : protocol) {
    tmp.noalias() = step(bang) * v;
    v.swap(tmp);
  }
  return v;
}

Eigen::VectorXcd FidelityEvaluator::evolve(const Protocol& protocol) const {
  Eigen::VectorXcd v = evolve_working(protocol);
  if (!reduced_) return v;
  Eigen::VectorXcd full =
      (sector_basis_ * v.real()).cast<Complex>();
  full += Complex(0.0, 1.0) * (sector_basis_ * v.imag()).cast<Complex>();
  return full;
}

double FidelityEvaluator::fidelity(const Protocol& protocol) const {
  const Complex amp = target_vec_.dot(evolve_working(protocol));
  return std::clamp(std::norm(amp), 0.0, 1.0);
}

double FidelityEvaluator::cost(const Protocol& protocol) const {
  return cost_from_fidelity(fidelity(protocol));
}

double FidelityEvaluator::cost_from_fidelity(double fidelity) const {
  return log_fidelity_cost(fidelity, problem_.n_sites, options_.cost_cap).value;
}

DeltaFidelityEvaluator::DeltaFidelityEvaluator(const FidelityEvaluator& eval)
    : eval_(&eval), n_(eval.problem().n_bangs) {
  scratch_.resize(eval.working_dim());
}

void DeltaFidelityEvaluator::reset(const Protocol& protocol) {
  if (static_cast<int>(protocol.size()) != n_)
    throw std::invalid_argument("protocol length does not match N_T");
  protocol_ = protocol;
  fwd_.resize(n_ + 1);
  back_.resize(n_ + 1);
  wflip_.resize(n_);
  rows_.assign(n_, {});
  fwd_[0] = eval_->initial_vec();
  back_[n_] = eval_->target_vec();
  rebuild(0, n_ - 1);
}

double DeltaFidelityEvaluator::current_cost() const {
  return eval_->cost_from_fidelity(current_fidelity_);
}

void DeltaFidelityEvaluator::rebuild(int first, int last) {
  for (int j = first + 1; j <= n_; ++j)
    fwd_[j].noalias() = eval_->step(protocol_[j - 1]) * fwd_[j - 1];
  for (int j = std::min(last, n_ - 1); j >= 0; --j)
    back_[j].noalias() = eval_->step_dagger(protocol_[j]) * back_[j + 1];
  for (int p = 0; p <= std::min(last, n_ - 1); ++p)
    wflip_[p].noalias() =
        eval_->step_dagger(static_cast<std::int8_t>(-protocol_[p])) * back_[p + 1];
  for (auto& row : rows_) row.clear();
  current_fidelity_ =
      std::clamp(std::norm(eval_->target_vec().dot(fwd_[n_])), 0.0, 1.0);
}

const Eigen::VectorXcd& DeltaFidelityEvaluator::flipped_row(int p, int upto) {
  auto& row = rows_[p];
  if (row.empty())
    row.push_back(eval_->step(static_cast<std::int8_t>(-protocol_[p])) * fwd_[p]);
  while (static_cast<int>(row.size()) <= upto - p) {
    const int m = p + static_cast<int>(row.size());
    row.push_back(eval_->step(protocol_[m]) * row.back());
  }
  return row[upto - p];
}

double DeltaFidelityEvaluator::fidelity_after_flips(
    std::span<const std::uint16_t> positions) {
  sorted_.assign(positions.begin(), positions.end());
  std::sort(sorted_.begin(), sorted_.end());
  const int k = static_cast<int>(sorted_.size());
  if (k == 0) return current_fidelity_;
  Complex amp;
  if (k == 1) {
    const int p = sorted_[0];
    amp = wflip_[p].dot(fwd_[p]);
  } else if (k == 2) {
    const int p = sorted_[0], r = sorted_[1];
    amp = wflip_[r].dot(flipped_row(p, r - 1));
  } else {
    const int p1 = sorted_[0], p2 = sorted_[1], pk = sorted_.back();
    scratch_ = flipped_row(p1, p2 - 1);
    Eigen::VectorXcd v =
        eval_->step(static_cast<std::int8_t>(-protocol_[p2])) * scratch_;
    std::size_t next = 2;
    for (int m = p2 + 1; m < pk; ++m) {
      const bool flip = next < sorted_.size() && sorted_[next] == m;
      if (flip) ++next;
      const std::int8_t bang = flip ? static_cast<std::int8_t>(-protocol_[m]) : protocol_[m];
      scratch_.noalias() = eval_->step(bang) * v;
      v.swap(scratch_);
    }
    amp = wflip_[pk].dot(v);
  }
  return std::clamp(std::norm(amp), 0.0, 1.0);
}

void DeltaFidelityEvaluator::accept(std::span<const std::uint16_t> positions) {
  sorted_.assign(positions.begin(), positions.end());
  std::sort(sorted_.begin(), sorted_.end());
  if (sorted_.empty()) return;
  for (auto p : sorted_) protocol_[p] = static_cast<std::int8_t>(-protocol_[p]);
  rebuild(sorted_.front(), sorted_.back());
}

}  // namespace qcland
