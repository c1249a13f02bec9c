#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "qcland/stochastic_descent.hpp"

namespace qcland {

/// Indices of records whose fidelity is >= fraction * (best fidelity in
/// the set); all indices when no filter is given.
std::vector<std::size_t> filtered_indices(const SampleSet& sample,
                                          std::optional<double> fidelity_fraction);

/// Edwards-Anderson-style protocol correlator in normalized units:
/// q = (1/N_T) sum_j (1 - mean_j^2), with mean_j the sample average of
/// sigma_j over the retained minima. 0 when all retained protocols are
/// identical, 1 for uncorrelated ones.
double correlator_q(const SampleSet& sample,
                    std::optional<double> fidelity_fraction = {});

/// Same correlator computed from the physical field h = h_max * sigma as
/// (1/(h_max^2 N_T)) sum_j mean[(h_j - hbar_j)^2]; agrees with
/// correlator_q to roundoff and exists as a cross-check path.
double correlator_q_field_units(const SampleSet& sample,
                                std::optional<double> fidelity_fraction = {});

/// f = M_star / M over the retained records.
double distinct_fraction(const SampleSet& sample,
                         std::optional<double> fidelity_fraction = {});

struct OrderParameters {
  double q = 0.0;
  double f = 0.0;
  int m = 0;
  int m_star = 0;
  std::optional<double> fidelity_filter;
  double best_fidelity = 0.0;
  double best_cost = 0.0;
};

OrderParameters order_parameters(const SampleSet& sample,
                                 std::optional<double> fidelity_fraction = {});

/// Normalized Hamming distances d_ab = #{j: sigma_j^a != sigma_j^b} / N_T.
Eigen::MatrixXd hamming_matrix(std::span<const Protocol> protocols);

struct Histogram {
  std::vector<double> edges;    // bins + 1 ascending values
  std::vector<double> density;  // counts / (total * width)
  std::vector<std::int64_t> counts;
  double total() const;
};

/// Histogram of the upper-triangle entries over the fixed range [0, 1].
Histogram pairwise_histogram(const Eigen::MatrixXd& distances, int bins);

enum class DosOrigin { enumeration, sampled };

struct DosHistogram {
  Histogram hist;
  DosOrigin origin = DosOrigin::enumeration;
};

/// Normalized density of states over the observed cost range.
DosHistogram dos(std::span<const double> costs, int bins,
                 DosOrigin origin = DosOrigin::enumeration);

struct ExcitationRecord {
  std::vector<int> flips;
  int magnetization = 0;  // sum_j (sigma'_j - sigma_j), normalized units
  double cost = 0.0;
  double delta_cost = 0.0;
};

/// All flip sets of each requested order applied to a reference protocol,
/// with their magnetization and cost change. Orders appear in the given
/// sequence, flip sets in lexicographic order.
std::vector<ExcitationRecord> excitations(const FidelityEvaluator& eval,
                                          const Protocol& reference,
                                          std::span<const int> flip_orders);

/// Same, but reading costs out of a full enumeration table.
std::vector<ExcitationRecord> excitations_from_table(std::span<const double> cost_table,
                                                     std::uint64_t reference_index,
                                                     int n_bangs,
                                                     std::span<const int> flip_orders);

/// Mean DOS density at the given costs, relative to the peak density.
double dos_weighted_overlap(const DosHistogram& dos,
                            std::span<const double> excitation_costs);

}  // namespace qcland
