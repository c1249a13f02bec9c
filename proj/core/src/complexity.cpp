#include "qcland/complexity.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "qcland/parallel.hpp"
#include "qcland/rng.hpp"

namespace qcland {

ComplexityEstimate estimate_complexity(const FidelityEvaluator& eval, int max_flips,
                                       int n_runs, std::uint64_t master_seed,
                                       const BruteForceResult& optimum,
                                       int n_threads) {
  if (n_runs < 1) throw std::invalid_argument("complexity estimation needs n_runs >= 1");

  std::vector<LocalMinimum> runs(n_runs);
  parallel_for(static_cast<std::size_t>(n_runs), n_threads,
               [&](std::size_t begin, std::size_t end) {
                 for (std::size_t i = begin; i < end; ++i)
                   runs[i] = sd_run(eval, max_flips,
                                    derive_seed(master_seed, "complexity-run", i));
               });

  ComplexityEstimate est;
  est.n_runs = n_runs;

  double sum = 0.0, sumsq = 0.0;
  for (const auto& r : runs) {
    const double x = static_cast<double>(r.n_eval);
    sum += x;
    sumsq += x * x;
  }
  est.mean_n_eval = sum / n_runs;
  if (n_runs > 1) {
    const double var = std::max(0.0, (sumsq - sum * sum / n_runs) / (n_runs - 1));
    est.sem_n_eval = std::sqrt(var / n_runs);
  }

  for (const auto& r : runs) {
    if (r.protocol == optimum.best) {
      ++est.n_hits;
    } else if (std::abs(r.cost - optimum.best_cost) < 1e-12) {
      ++est.n_hits;
      est.degenerate_optimum = true;
    }
  }

  if (est.n_hits > 0) {
    est.p_opt = static_cast<double>(est.n_hits) / n_runs;
    est.sem_p_opt = std::sqrt(est.p_opt * (1.0 - est.p_opt) / n_runs);
    est.complexity = est.mean_n_eval / est.p_opt;
    const double rel_m = est.mean_n_eval > 0 ? est.sem_n_eval / est.mean_n_eval : 0.0;
    const double rel_p = est.sem_p_opt / est.p_opt;
    est.sem_complexity = est.complexity * std::sqrt(rel_m * rel_m + rel_p * rel_p);
  } else {
    est.censored = true;
    est.p_opt = 1.0 / n_runs;  // lower bound, flagged
    est.sem_p_opt = 0.0;
    est.complexity = est.mean_n_eval * n_runs;
    est.sem_complexity = std::numeric_limits<double>::quiet_NaN();
  }
  return est;
}

}  // namespace qcland
