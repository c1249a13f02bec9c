#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qcland/control_problem.hpp"

namespace qcland {

struct SweepSpec {
  std::vector<double> t_values;
  std::vector<int> nt_values;
  std::vector<int> k_values{1};
  int samples = 100;  // M per grid cell
};

struct AnalysisToggles {
  bool order_parameters = false;
  bool dos = false;
  bool couplings = false;
  bool fits = false;
  bool embedding = false;
  bool complexity = false;

  std::optional<double> fidelity_filter;  // fraction of the best fidelity
  int dos_bins = 100;
  std::vector<int> excitation_orders{1, 2};
  int low_manifold_size = 2000;
  std::vector<int> fit_orders{1, 2};
  int complexity_runs = 1000;
  int embedding_points = 1000;
  int embedding_attempts_factor = 4;  // oversampling budget for unique minima
  double tsne_perplexity = 60.0;
  int tsne_iterations = 1000;
  double tsne_learning_rate = 200.0;
  double cluster_dc_quantile = 0.02;
  std::optional<int> cluster_centers;  // auto when unset

  bool operator==(const AnalysisToggles&) const = default;
};

inline bool operator==(const SweepSpec& a, const SweepSpec& b) {
  return a.t_values == b.t_values && a.nt_values == b.nt_values &&
         a.k_values == b.k_values && a.samples == b.samples;
}

struct ExperimentConfig {
  ControlProblem problem;  // duration / n_bangs are filled per grid cell
  SweepSpec sweep;
  AnalysisToggles analysis;
  std::uint64_t seed = 1;
  std::string output_dir = "out";
  int max_enum_bangs = 24;
  int threads = 1;

  bool operator==(const ExperimentConfig&) const = default;
};

struct ParseResult {
  ExperimentConfig config;
  std::vector<std::string> errors;  // every violation, not just the first
  bool ok() const { return errors.empty(); }
};

/// Plain-text key/value format with nested `name { ... }` blocks,
/// `#` comments, `[a, b, c]` lists and `start:stop:step` ranges.
/// Unknown keys are rejected. See the repository README for the grammar.
ParseResult parse_config(const std::string& text);

/// Canonical rendering; parse(serialize(c)) == c.
std::string serialize_config(const ExperimentConfig& config);

}  // namespace qcland
