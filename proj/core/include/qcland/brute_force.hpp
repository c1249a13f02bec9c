#pragma once

#include <cstdint>
#include <vector>

#include "qcland/quantum.hpp"

namespace qcland {

struct BruteForceResult {
  Protocol best;
  std::uint64_t best_index = 0;
  double best_cost = 0.0;
  double best_fidelity = 0.0;
  bool degenerate = false;  // another protocol within 1e-12 of the optimum cost
  int n_bangs = 0;
  /// Full log-fidelity table indexed per protocol_index(); empty unless requested.
  std::vector<double> cost_table;
};

/// Exact global optimum over all 2^N_T protocols via a meet-in-the-middle
/// split: forward half-products from the initial state, backward
/// half-products from the target, one inner product per protocol.
/// Rejects N_T above enumeration_cap with a resource error.
BruteForceResult brute_force_optimum(const FidelityEvaluator& eval,
                                     bool keep_table = false,
                                     int enumeration_cap = 24);

}  // namespace qcland
