#include "qcland/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace qcland::io {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_atomic(const std::filesystem::path& path, std::string_view content) {
  std::filesystem::create_directories(path.parent_path());
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
  }
  std::filesystem::rename(tmp, path);
}

std::uint64_t fnv1a64_bytes(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string file_hash_hex(const std::filesystem::path& path) {
  const std::uint64_t h = fnv1a64_bytes(read_text(path));
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

CsvWriter::CsvWriter(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvWriter::add_row(std::vector<std::string> fields) {
  if (fields.size() != header_.size())
    throw std::invalid_argument("csv row width does not match header");
  rows_.push_back(std::move(fields));
}

std::string CsvWriter::str() const {
  std::string out;
  auto join = [&out](const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out.push_back(',');
      out += fields[i];
    }
    out.push_back('\n');
  };
  join(header_);
  for (const auto& r : rows_) join(r);
  return out;
}

int CsvTable::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return static_cast<int>(i);
  return -1;
}

CsvTable read_csv(const std::filesystem::path& path) {
  const std::string text = read_text(path);
  CsvTable table;
  std::istringstream in(text);
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      fields.push_back(line.substr(start, comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (first) {
      table.header = std::move(fields);
      first = false;
    } else {
      table.rows.push_back(std::move(fields));
    }
  }
  return table;
}

void save_sample_set(const std::filesystem::path& dir, const SampleSet& set,
                     std::string_view stem) {
  CsvWriter csv({"index", "seed", "cost", "fidelity", "n_eval", "accepted_moves",
                 "protocol"});
  for (std::size_t i = 0; i < set.records.size(); ++i) {
    const auto& r = set.records[i];
    csv.add_row({std::to_string(i), std::to_string(r.seed), format_double(r.cost),
                 format_double(r.fidelity), std::to_string(r.n_eval),
                 std::to_string(r.accepted_moves), protocol_string(r.protocol)});
  }
  write_text_atomic(dir / (std::string(stem) + ".csv"), csv.str());

  nlohmann::json meta;
  meta["problem"] = {{"L", set.problem.n_sites},
                     {"J", set.problem.coupling},
                     {"g", set.problem.field_z},
                     {"h_max", set.problem.field_bound},
                     {"h_init", set.problem.field_initial},
                     {"h_target", set.problem.field_target},
                     {"T", set.problem.duration},
                     {"N_T", set.problem.n_bangs},
                     {"spin_convention", to_string(set.problem.convention)}};
  meta["k"] = set.flip_order;
  meta["master_seed"] = set.master_seed;
  meta["M"] = set.size();
  meta["M_star"] = set.distinct_count();
  meta["records_file"] = std::string(stem) + ".csv";
  write_text_atomic(dir / (std::string(stem) + ".json"), meta.dump(2) + "\n");
}

SampleSet load_sample_set(const std::filesystem::path& dir, std::string_view stem) {
  const auto meta =
      nlohmann::json::parse(read_text(dir / (std::string(stem) + ".json")));
  SampleSet set;
  const auto& p = meta.at("problem");
  set.problem.n_sites = p.at("L").get<int>();
  set.problem.coupling = p.at("J").get<double>();
  set.problem.field_z = p.at("g").get<double>();
  set.problem.field_bound = p.at("h_max").get<double>();
  set.problem.field_initial = p.at("h_init").get<double>();
  set.problem.field_target = p.at("h_target").get<double>();
  set.problem.duration = p.at("T").get<double>();
  set.problem.n_bangs = p.at("N_T").get<int>();
  spin_convention_from_string(p.at("spin_convention").get<std::string>(),
                              set.problem.convention);
  set.flip_order = meta.at("k").get<int>();
  set.master_seed = meta.at("master_seed").get<std::uint64_t>();

  const CsvTable csv = read_csv(dir / meta.at("records_file").get<std::string>());
  const int c_seed = csv.column("seed"), c_cost = csv.column("cost"),
            c_fid = csv.column("fidelity"), c_ne = csv.column("n_eval"),
            c_acc = csv.column("accepted_moves"), c_prot = csv.column("protocol");
  if (c_seed < 0 || c_cost < 0 || c_fid < 0 || c_ne < 0 || c_acc < 0 || c_prot < 0)
    throw std::runtime_error("sample CSV is missing required columns");
  for (const auto& row : csv.rows) {
    LocalMinimum m;
    m.seed = std::stoull(row[c_seed]);
    m.cost = std::stod(row[c_cost]);
    m.fidelity = std::stod(row[c_fid]);
    m.n_eval = std::stoull(row[c_ne]);
    m.accepted_moves = std::stoull(row[c_acc]);
    m.protocol = protocol_from_string(row[c_prot]);
    m.flip_order = set.flip_order;
    set.records.push_back(std::move(m));
  }
  return set;
}

}  // namespace qcland::io
