#pragma once

#include <cstdint>

#include "qcland/brute_force.hpp"
#include "qcland/stochastic_descent.hpp"

namespace qcland {

/// Search effort for locating the global optimum with SD_k: the mean
/// number of fidelity evaluations per run divided by the probability
/// that a single run lands on the optimum.
struct ComplexityEstimate {
  double mean_n_eval = 0.0;
  double sem_n_eval = 0.0;
  double p_opt = 0.0;
  double sem_p_opt = 0.0;
  double complexity = 0.0;
  double sem_complexity = 0.0;
  int n_runs = 0;
  int n_hits = 0;
  bool censored = false;            // zero hits: p_opt replaced by the 1/n lower bound
  bool degenerate_optimum = false;  // hits include cost-degenerate distinct protocols
};

ComplexityEstimate estimate_complexity(const FidelityEvaluator& eval, int max_flips,
                                       int n_runs, std::uint64_t master_seed,
                                       const BruteForceResult& optimum,
                                       int n_threads = 1);

}  // namespace qcland
