#include "qcland/landscape_stats.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <unordered_set>

#include "qcland/combinatorics.hpp"

namespace qcland {

std::vector<std::size_t> filtered_indices(const SampleSet& sample,
                                          std::optional<double> fidelity_fraction) {
  std::vector<std::size_t> idx;
  idx.reserve(sample.records.size());
  if (!fidelity_fraction) {
    for (std::size_t i = 0; i < sample.records.size(); ++i) idx.push_back(i);
    return idx;
  }
  const double threshold = *fidelity_fraction * sample.best_fidelity();
  for (std::size_t i = 0; i < sample.records.size(); ++i)
    if (sample.records[i].fidelity >= threshold) idx.push_back(i);
  return idx;
}

namespace {

void require_nonempty(const std::vector<std::size_t>& idx) {
  if (idx.empty()) throw std::invalid_argument("no records left after filtering");
}

}  // namespace

double correlator_q(const SampleSet& sample, std::optional<double> fidelity_fraction) {
  const auto idx = filtered_indices(sample, fidelity_fraction);
  require_nonempty(idx);
  const int n = sample.problem.n_bangs;
  if (n == 0) return 0.0;
  const double m = static_cast<double>(idx.size());
  double q = 0.0;
  for (int j = 0; j < n; ++j) {
    std::int64_t s = 0;
    for (auto i : idx) s += sample.records[i].protocol[j];
    const double mean = static_cast<double>(s) / m;
    q += 1.0 - mean * mean;
  }
  return q / n;
}

double correlator_q_field_units(const SampleSet& sample,
                                std::optional<double> fidelity_fraction) {
  const auto idx = filtered_indices(sample, fidelity_fraction);
  require_nonempty(idx);
  const int n = sample.problem.n_bangs;
  if (n == 0) return 0.0;
  const double h = sample.problem.field_bound;
  const double m = static_cast<double>(idx.size());
  double q = 0.0;
  for (int j = 0; j < n; ++j) {
    double hbar = 0.0;
    for (auto i : idx) hbar += h * sample.records[i].protocol[j];
    hbar /= m;
    double var = 0.0;
    for (auto i : idx) {
      const double d = h * sample.records[i].protocol[j] - hbar;
      var += d * d;
    }
    q += var / m;
  }
  return q / (h * h * n);
}

double distinct_fraction(const SampleSet& sample,
                         std::optional<double> fidelity_fraction) {
  const auto idx = filtered_indices(sample, fidelity_fraction);
  require_nonempty(idx);
  std::unordered_set<std::string> seen;
  for (auto i : idx) {
    const auto& p = sample.records[i].protocol;
    seen.insert(std::string(reinterpret_cast<const char*>(p.data()), p.size()));
  }
  return static_cast<double>(seen.size()) / static_cast<double>(idx.size());
}

OrderParameters order_parameters(const SampleSet& sample,
                                 std::optional<double> fidelity_fraction) {
  const auto idx = filtered_indices(sample, fidelity_fraction);
  require_nonempty(idx);
  OrderParameters op;
  op.fidelity_filter = fidelity_fraction;
  op.m = static_cast<int>(idx.size());
  op.q = correlator_q(sample, fidelity_fraction);
  op.f = distinct_fraction(sample, fidelity_fraction);
  op.m_star = static_cast<int>(std::llround(op.f * op.m));
  op.best_fidelity = sample.best_fidelity();
  double best_cost = std::numeric_limits<double>::infinity();
  for (auto i : idx) best_cost = std::min(best_cost, sample.records[i].cost);
  op.best_cost = best_cost;
  return op;
}

Eigen::MatrixXd hamming_matrix(std::span<const Protocol> protocols) {
  const int m = static_cast<int>(protocols.size());
  const int n = m > 0 ? static_cast<int>(protocols[0].size()) : 0;
  for (const auto& p : protocols)
    if (static_cast<int>(p.size()) != n)
      throw std::invalid_argument("protocols must share a common length");

  // pack bangs into words so a pair comparison is a few popcounts
  const int words = (n + 63) / 64;
  std::vector<std::uint64_t> bits(static_cast<std::size_t>(m) * words, 0);
  for (int a = 0; a < m; ++a)
    for (int j = 0; j < n; ++j)
      if (protocols[a][j] < 0)
        bits[static_cast<std::size_t>(a) * words + j / 64] |= std::uint64_t{1} << (j % 64);

  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(m, m);
  for (int a = 0; a < m; ++a) {
    const std::uint64_t* wa = bits.data() + static_cast<std::size_t>(a) * words;
    for (int b = a + 1; b < m; ++b) {
      const std::uint64_t* wb = bits.data() + static_cast<std::size_t>(b) * words;
      int diff = 0;
      for (int w = 0; w < words; ++w) diff += std::popcount(wa[w] ^ wb[w]);
      const double dist = n > 0 ? static_cast<double>(diff) / n : 0.0;
      d(a, b) = dist;
      d(b, a) = dist;
    }
  }
  return d;
}

double Histogram::total() const {
  std::int64_t t = 0;
  for (auto c : counts) t += c;
  return static_cast<double>(t);
}

namespace {

Histogram histogram_over(std::span<const double> values, int bins, double lo, double hi) {
  if (bins < 1) throw std::invalid_argument("histogram needs at least one bin");
  Histogram h;
  h.edges.resize(bins + 1);
  const double width = (hi - lo) / bins;
  for (int b = 0; b <= bins; ++b) h.edges[b] = lo + b * width;
  h.counts.assign(bins, 0);
  for (double v : values) {
    int b = static_cast<int>((v - lo) / width);
    b = std::clamp(b, 0, bins - 1);
    ++h.counts[b];
  }
  h.density.assign(bins, 0.0);
  const double total = h.total();
  if (total > 0)
    for (int b = 0; b < bins; ++b) h.density[b] = h.counts[b] / (total * width);
  return h;
}

}  // namespace

Histogram pairwise_histogram(const Eigen::MatrixXd& distances, int bins) {
  std::vector<double> upper;
  const int m = static_cast<int>(distances.rows());
  upper.reserve(static_cast<std::size_t>(m) * (m - 1) / 2);
  for (int a = 0; a < m; ++a)
    for (int b = a + 1; b < m; ++b) upper.push_back(distances(a, b));
  return histogram_over(upper, bins, 0.0, 1.0);
}

DosHistogram dos(std::span<const double> costs, int bins, DosOrigin origin) {
  if (costs.empty()) throw std::invalid_argument("density of states needs costs");
  double lo = costs[0], hi = costs[0];
  for (double c : costs) {
    lo = std::min(lo, c);
    hi = std::max(hi, c);
  }
  if (hi == lo) {  // degenerate range: give the single value a unit-width bin
    lo -= 0.5;
    hi += 0.5;
  }
  DosHistogram d;
  d.hist = histogram_over(costs, bins, lo, hi);
  d.origin = origin;
  return d;
}

namespace {

ExcitationRecord make_record(const Protocol& reference, const std::vector<int>& flips,
                             double cost, double ref_cost) {
  ExcitationRecord rec;
  rec.flips = flips;
  int mh = 0;
  for (int p : flips) mh -= 2 * reference[p];  // sigma' - sigma = -2 sigma
  rec.magnetization = mh;
  rec.cost = cost;
  rec.delta_cost = cost - ref_cost;
  return rec;
}

}  // namespace

std::vector<ExcitationRecord> excitations(const FidelityEvaluator& eval,
                                          const Protocol& reference,
                                          std::span<const int> flip_orders) {
  const int n = eval.problem().n_bangs;
  DeltaFidelityEvaluator delta(eval);
  delta.reset(reference);
  const double ref_cost = delta.current_cost();
  std::vector<ExcitationRecord> out;
  std::vector<std::uint16_t> pos;
  for (int order : flip_orders) {
    if (order < 0 || order > n)
      throw std::invalid_argument("flip order out of range");
    for_each_combination(n, order, [&](const std::vector<int>& c) {
      pos.assign(c.begin(), c.end());
      const double f = order == 0 ? delta.current_fidelity()
                                  : delta.fidelity_after_flips(pos);
      out.push_back(make_record(reference, c, eval.cost_from_fidelity(f), ref_cost));
    });
  }
  return out;
}

std::vector<ExcitationRecord> excitations_from_table(std::span<const double> cost_table,
                                                     std::uint64_t reference_index,
                                                     int n_bangs,
                                                     std::span<const int> flip_orders) {
  if (cost_table.size() != (std::size_t{1} << n_bangs))
    throw std::invalid_argument("cost table size must be 2^N_T");
  const Protocol reference = protocol_from_index(reference_index, n_bangs);
  const double ref_cost = cost_table[reference_index];
  std::vector<ExcitationRecord> out;
  for (int order : flip_orders) {
    if (order < 0 || order > n_bangs)
      throw std::invalid_argument("flip order out of range");
    for_each_combination(n_bangs, order, [&](const std::vector<int>& c) {
      std::uint64_t mask = 0;
      for (int p : c) mask |= std::uint64_t{1} << p;
      out.push_back(make_record(reference, c, cost_table[reference_index ^ mask],
                                ref_cost));
    });
  }
  return out;
}

double dos_weighted_overlap(const DosHistogram& dos,
                            std::span<const double> excitation_costs) {
  if (excitation_costs.empty())
    throw std::invalid_argument("overlap needs at least one excitation cost");
  const auto& h = dos.hist;
  const int bins = static_cast<int>(h.density.size());
  const double lo = h.edges.front();
  const double width = h.edges[1] - h.edges[0];
  double peak = 0.0;
  for (double d : h.density) peak = std::max(peak, d);
  if (peak <= 0) throw std::invalid_argument("empty density of states");
  double acc = 0.0;
  for (double c : excitation_costs) {
    const int b = static_cast<int>((c - lo) / width);
    if (b >= 0 && b < bins) acc += h.density[b];
    else if (b == bins && c <= h.edges.back()) acc += h.density[bins - 1];
  }
  return acc / (excitation_costs.size() * peak);
}

}  // namespace qcland
