#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qcland/rng.hpp"

namespace qcland {

/// Matrix convention for the spin operators entering the chain Hamiltonian.
/// `pauli` uses sigma matrices (eigenvalues +-1), `spin_half` uses sigma/2.
enum class SpinConvention { pauli, spin_half };

std::string to_string(SpinConvention c);
bool spin_convention_from_string(const std::string& s, SpinConvention& out);

/// A driven periodic Ising chain together with the bang-bang discretization
/// of its global transverse-field control.
struct ControlProblem {
  int n_sites = 6;              // L
  double coupling = 1.0;        // J, nearest-neighbour zz
  double field_z = 1.0;         // g, static longitudinal field
  double field_bound = 4.0;     // |h(t)| <= field_bound
  double field_initial = -2.0;  // initial state: ground state of H[field_initial]
  double field_target = 2.0;    // target state: ground state of H[field_target]
  double duration = 1.0;        // T
  int n_bangs = 0;              // N_T
  SpinConvention convention = SpinConvention::pauli;
  int max_sites = 12;           // dense 2^L work above this is rejected

  double dt() const { return n_bangs > 0 ? duration / n_bangs : 0.0; }
  long dim() const { return 1L << n_sites; }

  /// All violated constraints, empty when the problem is usable.
  std::vector<std::string> validate() const;

  bool operator==(const ControlProblem&) const = default;
};

/// Bang sequence, one entry per time step, values in {-1, +1}.
/// The physical field is field_bound * sigma_j.
using Protocol = std::vector<std::int8_t>;

Protocol random_protocol(int n_bangs, Rng& rng);

/// '+'/'-' rendering, one character per bang.
std::string protocol_string(const Protocol& p);
Protocol protocol_from_string(const std::string& s);

/// Index of a protocol in the 2^N_T enumeration used by cost tables and
/// the multilinear (Walsh) expansion: bit j clear means sigma_j = +1,
/// bit j set means sigma_j = -1. Requires N_T <= 63.
std::uint64_t protocol_index(const Protocol& p);
Protocol protocol_from_index(std::uint64_t index, int n_bangs);

}  // namespace qcland
