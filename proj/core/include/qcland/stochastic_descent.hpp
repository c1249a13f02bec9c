#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "qcland/quantum.hpp"

namespace qcland {

/// One candidate move: flip the first `size` positions of `pos`.
struct Update {
  std::array<std::uint16_t, 8> pos{};
  std::uint8_t size = 0;
  std::span<const std::uint16_t> view() const { return {pos.data(), size}; }
};

/// All flip sets of cardinality 1..max_flips over n_bangs positions,
/// sizes ascending, each size in lexicographic order. The count equals
/// sum_{i=1..max_flips} C(n_bangs, i).
std::vector<Update> enumerate_updates(int n_bangs, int max_flips);

struct LocalMinimum {
  Protocol protocol;
  double cost = 0.0;
  double fidelity = 0.0;
  std::uint64_t n_eval = 0;  // fidelity evaluations, one per examined update
  int flip_order = 0;
  std::uint64_t seed = 0;
  std::uint64_t accepted_moves = 0;
};

/// Costs after the initial draw and after every accepted move.
struct DescentTrace {
  std::vector<double> accepted_costs;
};

/// One stochastic-descent chain: start from a random protocol, repeatedly
/// shuffle the update list and commit the first strictly fidelity-improving
/// move, restarting the sweep after every acceptance; halt when a full
/// sweep finds nothing. The result is a certified k-flip local minimum.
LocalMinimum sd_run(const FidelityEvaluator& eval, int max_flips, std::uint64_t seed,
                    DescentTrace* trace = nullptr);

/// True iff no update of at most max_flips flips strictly improves fidelity.
bool certify_local_minimum(const FidelityEvaluator& eval, const Protocol& protocol,
                           int max_flips);

struct SampleSet {
  ControlProblem problem;
  int flip_order = 0;
  std::uint64_t master_seed = 0;
  std::vector<LocalMinimum> records;

  int size() const { return static_cast<int>(records.size()); }
  int distinct_count() const;
  double best_fidelity() const;
};

/// M independent sd_run results with per-run derived seeds; identical
/// output for any worker count.
SampleSet sample(const FidelityEvaluator& eval, int max_flips, int n_samples,
                 std::uint64_t master_seed, int n_threads = 1);

}  // namespace qcland
