#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "qcland/config.hpp"

namespace qcland {

struct CellKey {
  double duration = 0.0;
  int n_bangs = 0;
  int flip_order = 1;

  std::string dir_name() const;  // "T=2.4000_NT=100_k=2"
  std::string label() const;
};

struct CellOutcome {
  CellKey key;
  bool ok = true;
  std::string error;
  std::vector<std::string> files;  // relative to the run directory
  double wall_seconds = 0.0;
};

struct ExperimentResult {
  std::filesystem::path dir;
  std::vector<CellOutcome> cells;
  bool total_failure = false;
};

/// Runs every (T, N_T, k) grid cell requested by the config: sampling,
/// statistics, enumeration-based analyses, fits and embeddings per the
/// toggles. Each cell persists its own artifacts (atomically) so sweeps
/// are resumable; a manifest lists every file with a content hash.
/// Identical config and seed reproduce identical numeric outputs.
ExperimentResult run_experiment(const ExperimentConfig& config);

enum class PlotKind {
  phase_diagram,
  dos_excitations,
  hamming_hist,
  coupling_maps,
  complexity_scaling,
  embedding_map,
};

bool plot_kind_from_string(const std::string& s, PlotKind& out);
std::string to_string(PlotKind kind);

/// Aggregates persisted cell artifacts of a finished run into one tidy
/// CSV per figure kind under <run_dir>/plots/. Missing upstream artifacts
/// raise an error naming the analysis toggle to enable.
std::filesystem::path emit_plot_data(const std::filesystem::path& run_dir, PlotKind kind);

}  // namespace qcland
