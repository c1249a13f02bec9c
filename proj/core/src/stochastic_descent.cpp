#include "qcland/stochastic_descent.hpp"

#include <stdexcept>
#include <string>
#include <unordered_set>

#include "qcland/combinatorics.hpp"
#include "qcland/parallel.hpp"
#include "qcland/rng.hpp"

namespace qcland {

std::vector<Update> enumerate_updates(int n_bangs, int max_flips) {
  if (max_flips < 1 || max_flips > n_bangs)
    throw std::invalid_argument("flip order must satisfy 1 <= k <= N_T");
  if (max_flips > 8)
    throw std::invalid_argument("flip orders above 8 are not supported (update list would be astronomical)");
  std::uint64_t total = 0;
  for (int size = 1; size <= max_flips; ++size) total += binomial(n_bangs, size);
  if (total > (std::uint64_t{1} << 27))
    throw std::invalid_argument("update list of " + std::to_string(total) +
                                " moves exceeds the resource cap");
  std::vector<Update> updates;
  updates.reserve(total);
  for (int size = 1; size <= max_flips; ++size) {
    for_each_combination(n_bangs, size, [&](const std::vector<int>& c) {
      Update u;
      u.size = static_cast<std::uint8_t>(size);
      for (int i = 0; i < size; ++i) u.pos[i] = static_cast<std::uint16_t>(c[i]);
      updates.push_back(u);
    });
  }
  return updates;
}

LocalMinimum sd_run(const FidelityEvaluator& eval, int max_flips, std::uint64_t seed,
                    DescentTrace* trace) {
  const int n = eval.problem().n_bangs;
  if (n < 1) throw std::invalid_argument("stochastic descent needs N_T >= 1");
  Rng rng(seed);
  Protocol protocol = random_protocol(n, rng);
  std::vector<Update> updates = enumerate_updates(n, max_flips);

  DeltaFidelityEvaluator delta(eval);
  delta.reset(protocol);
  std::uint64_t n_eval = 1;
  std::uint64_t accepted = 0;
  if (trace) trace->accepted_costs.push_back(delta.current_cost());

  bool improved = true;
  while (improved) {
    rng.shuffle(updates);
    improved = false;
    for (const Update& u : updates) {
      ++n_eval;
      if (delta.fidelity_after_flips(u.view()) > delta.current_fidelity()) {
        delta.accept(u.view());
        ++accepted;
        improved = true;
        if (trace) trace->accepted_costs.push_back(delta.current_cost());
        break;
      }
    }
  }

  LocalMinimum m;
  m.protocol = delta.protocol();
  m.fidelity = delta.current_fidelity();
  m.cost = delta.current_cost();
  m.n_eval = n_eval;
  m.flip_order = max_flips;
  m.seed = seed;
  m.accepted_moves = accepted;
  return m;
}

bool certify_local_minimum(const FidelityEvaluator& eval, const Protocol& protocol,
                           int max_flips) {
  DeltaFidelityEvaluator delta(eval);
  delta.reset(protocol);
  const std::vector<Update> updates = enumerate_updates(eval.problem().n_bangs, max_flips);
  for (const Update& u : updates)
    if (delta.fidelity_after_flips(u.view()) > delta.current_fidelity()) return false;
  return true;
}

int SampleSet::distinct_count() const {
  std::unordered_set<std::string> seen;
  for (const auto& r : records)
    seen.insert(std::string(reinterpret_cast<const char*>(r.protocol.data()),
                            r.protocol.size()));
  return static_cast<int>(seen.size());
}

double SampleSet::best_fidelity() const {
  double best = 0.0;
  for (const auto& r : records) best = std::max(best, r.fidelity);
  return best;
}

SampleSet sample(const FidelityEvaluator& eval, int max_flips, int n_samples,
                 std::uint64_t master_seed, int n_threads) {
  if (n_samples < 1) throw std::invalid_argument("sample count must be >= 1");
  SampleSet set;
  set.problem = eval.problem();
  set.flip_order = max_flips;
  set.master_seed = master_seed;
  set.records.resize(n_samples);
  parallel_for(static_cast<std::size_t>(n_samples), n_threads,
               [&](std::size_t begin, std::size_t end) {
                 for (std::size_t i = begin; i < end; ++i)
                   set.records[i] =
                       sd_run(eval, max_flips, derive_seed(master_seed, "sd-run", i));
               });
  return set;
}

}  // namespace qcland
