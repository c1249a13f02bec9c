#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qcland/stochastic_descent.hpp"

namespace qcland::io {

/// Shortest round-trip decimal rendering (std::to_chars); "nan"/"inf" for
/// non-finite values. All persisted numbers go through this so reruns are
/// byte-identical.
std::string format_double(double v);

std::string read_text(const std::filesystem::path& path);

/// Write-temp-then-rename so partially written files never appear.
void write_text_atomic(const std::filesystem::path& path, std::string_view content);

std::uint64_t fnv1a64_bytes(std::string_view bytes);
std::string file_hash_hex(const std::filesystem::path& path);

/// Minimal comma-separated builder: no quoting, callers keep fields clean.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);
  void add_row(std::vector<std::string> fields);
  std::string str() const;
  std::size_t rows() const { return rows_.size(); }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  int column(std::string_view name) const;  // -1 when absent
};
CsvTable read_csv(const std::filesystem::path& path);

/// SampleSet persistence: metadata JSON plus a CSV protocol table with one
/// row per minimum (seed, cost, n_eval, bang string of +- characters).
void save_sample_set(const std::filesystem::path& dir, const SampleSet& set,
                     std::string_view stem = "samples");
SampleSet load_sample_set(const std::filesystem::path& dir,
                          std::string_view stem = "samples");

}  // namespace qcland::io
