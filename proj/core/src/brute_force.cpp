#include "qcland/brute_force.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <string>

namespace qcland {

namespace {

/// Fills states[s] for every sign pattern of bangs [first, first+count),
/// bit i of s describing bang first+i, by depth-first sharing of prefixes.
/// forward: apply U_sigma left to right from `start`.
/// backward: apply U_sigma^dagger right to left from `start` (bang
/// first+count-1 first), as seen from the target side.
void fill_half(const FidelityEvaluator& eval, const Eigen::VectorXcd& start,
               int first, int count, bool forward,
               std::vector<Eigen::VectorXcd>& states) {
  states.assign(std::size_t{1} << count, Eigen::VectorXcd());
  std::vector<Eigen::VectorXcd> path(count + 1);
  path[0] = start;
  // depth d handles bang index (forward: first+d) or (first+count-1-d).
  std::vector<int> branch(count, 0);
  int depth = 0;
  while (depth >= 0) {
    if (depth == count) {
      std::uint64_t idx = 0;
      for (int i = 0; i < count; ++i) {
        const int bang_bit = forward ? i : count - 1 - i;
        if (branch[i] == 1) idx |= std::uint64_t{1} << bang_bit;
      }
      states[idx] = path[count];
      --depth;
      while (depth >= 0 && branch[depth] == 1) --depth;
      if (depth >= 0) branch[depth] = 1;
      continue;
    }
    const std::int8_t bang = branch[depth] == 0 ? std::int8_t{1} : std::int8_t{-1};
    if (forward)
      path[depth + 1].noalias() = eval.step(bang) * path[depth];
    else
      path[depth + 1].noalias() = eval.step_dagger(bang) * path[depth];
    for (int below = depth + 1; below < count; ++below) branch[below] = 0;
    ++depth;
  }
}

}  // namespace

BruteForceResult brute_force_optimum(const FidelityEvaluator& eval, bool keep_table,
                                     int enumeration_cap) {
  const int n = eval.problem().n_bangs;
  if (n < 1) throw std::invalid_argument("enumeration needs N_T >= 1");
  if (n > enumeration_cap)
    throw std::runtime_error("enumerating 2^" + std::to_string(n) +
                             " protocols exceeds the cap of 2^" +
                             std::to_string(enumeration_cap) +
                             "; raise the cap to override");

  const int half1 = n / 2;
  const int half2 = n - half1;

  std::vector<Eigen::VectorXcd> fwd, back;
  fill_half(eval, eval.initial_vec(), 0, half1, /*forward=*/true, fwd);
  fill_half(eval, eval.target_vec(), half1, half2, /*forward=*/false, back);

  BruteForceResult result;
  result.n_bangs = n;
  if (keep_table) result.cost_table.resize(std::size_t{1} << n);

  double best = std::numeric_limits<double>::infinity();
  double second = std::numeric_limits<double>::infinity();
  std::uint64_t best_idx = 0;
  double best_fid = 0.0;

  for (std::uint64_t b = 0; b < (std::uint64_t{1} << half2); ++b) {
    const Eigen::VectorXcd& vb = back[b];
    const std::uint64_t base = b << half1;
    for (std::uint64_t a = 0; a < (std::uint64_t{1} << half1); ++a) {
      const double f = std::clamp(std::norm(vb.dot(fwd[a])), 0.0, 1.0);
      const double c = eval.cost_from_fidelity(f);
      if (keep_table) result.cost_table[base | a] = c;
      if (c < best) {
        second = best;
        best = c;
        best_idx = base | a;
        best_fid = f;
      } else if (c < second) {
        second = c;
      }
    }
  }

  result.best_index = best_idx;
  result.best = protocol_from_index(best_idx, n);
  result.best_cost = best;
  result.best_fidelity = best_fid;
  result.degenerate = second - best <= 1e-12;
  return result;
}

}  // namespace qcland
