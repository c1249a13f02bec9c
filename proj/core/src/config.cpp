#include "qcland/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <sstream>

#include "qcland/io.hpp"

namespace qcland {

namespace {

struct Entry {
  std::string path;  // "sweep.T", "problem.L", "seed", ...
  std::string value;
  int line = 0;
};

std::string trim(std::string s) {
  const auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
  while (!s.empty() && is_space(s.front())) s.erase(s.begin());
  while (!s.empty() && is_space(s.back())) s.pop_back();
  return s;
}

/// Flattens the block structure into dotted key/value entries.
void tokenize(const std::string& text, std::vector<Entry>& entries,
              std::vector<std::string>& errors) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::string> stack;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line == "}") {
      if (stack.empty())
        errors.push_back("line " + std::to_string(line_no) + ": unmatched '}'");
      else
        stack.pop_back();
      continue;
    }
    if (line.back() == '{') {
      std::string name = trim(line.substr(0, line.size() - 1));
      if (name.empty() || name.find_first_of(" \t={}") != std::string::npos) {
        errors.push_back("line " + std::to_string(line_no) + ": malformed block header");
        continue;
      }
      stack.push_back(name);
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      errors.push_back("line " + std::to_string(line_no) + ": expected 'key = value'");
      continue;
    }
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      errors.push_back("line " + std::to_string(line_no) + ": empty key or value");
      continue;
    }
    std::string path;
    for (const auto& b : stack) path += b + ".";
    path += key;
    entries.push_back({path, value, line_no});
  }
  if (!stack.empty()) errors.push_back("unclosed block '" + stack.back() + "'");
}

class Reader {
 public:
  Reader(std::vector<Entry> entries, std::vector<std::string>& errors)
      : entries_(std::move(entries)), errors_(&errors) {
    for (const auto& e : entries_) {
      if (std::count_if(entries_.begin(), entries_.end(),
                        [&](const Entry& o) { return o.path == e.path; }) > 1 &&
          !counted_duplicate(e.path)) {
        errors_->push_back("duplicate key '" + e.path + "'");
        duplicates_.push_back(e.path);
      }
    }
  }

  const Entry* take(const std::string& path) {
    for (auto& e : entries_) {
      if (e.path == path && !e.path.empty()) {
        consumed_.push_back(path);
        return &e;
      }
    }
    return nullptr;
  }

  void finish() {
    for (const auto& e : entries_) {
      if (std::find(consumed_.begin(), consumed_.end(), e.path) == consumed_.end())
        errors_->push_back("unknown key '" + e.path + "' (line " +
                           std::to_string(e.line) + ")");
    }
  }

  void error(const Entry& e, const std::string& what) {
    errors_->push_back("key '" + e.path + "' (line " + std::to_string(e.line) +
                       "): " + what);
  }

 private:
  bool counted_duplicate(const std::string& p) const {
    return std::find(duplicates_.begin(), duplicates_.end(), p) != duplicates_.end();
  }
  std::vector<Entry> entries_;
  std::vector<std::string>* errors_;
  std::vector<std::string> consumed_;
  std::vector<std::string> duplicates_;
};

bool parse_double(const std::string& s, double& out) {
  const char* begin = s.data();
  const char* end = begin + s.size();
  auto res = std::from_chars(begin, end, out);
  return res.ec == std::errc{} && res.ptr == end;
}

bool parse_int(const std::string& s, long long& out) {
  const char* begin = s.data();
  const char* end = begin + s.size();
  auto res = std::from_chars(begin, end, out);
  return res.ec == std::errc{} && res.ptr == end;
}

/// "[a, b, c]"  |  "lo:hi:step"  |  bare scalar
bool parse_double_list(const std::string& s, std::vector<double>& out) {
  out.clear();
  std::string body = trim(s);
  if (!body.empty() && body.front() == '[') {
    if (body.back() != ']') return false;
    body = body.substr(1, body.size() - 2);
    std::istringstream in(body);
    std::string item;
    while (std::getline(in, item, ',')) {
      item = trim(item);
      if (item.empty()) return false;
      double v;
      if (!parse_double(item, v)) return false;
      out.push_back(v);
    }
    return !out.empty();
  }
  if (std::count(body.begin(), body.end(), ':') == 2) {
    const auto c1 = body.find(':');
    const auto c2 = body.find(':', c1 + 1);
    double lo, hi, step;
    if (!parse_double(trim(body.substr(0, c1)), lo) ||
        !parse_double(trim(body.substr(c1 + 1, c2 - c1 - 1)), hi) ||
        !parse_double(trim(body.substr(c2 + 1)), step))
      return false;
    if (step <= 0 || hi < lo) return false;
    for (double v = lo; v <= hi + 1e-9 * step; v += step) out.push_back(v);
    return true;
  }
  double v;
  if (!parse_double(body, v)) return false;
  out.push_back(v);
  return true;
}

bool parse_int_list(const std::string& s, std::vector<int>& out) {
  std::vector<double> vals;
  if (!parse_double_list(s, vals)) return false;
  out.clear();
  for (double v : vals) {
    if (v != std::floor(v)) return false;
    out.push_back(static_cast<int>(v));
  }
  return true;
}

}  // namespace

ParseResult parse_config(const std::string& text) {
  ParseResult result;
  std::vector<Entry> entries;
  tokenize(text, entries, result.errors);
  Reader reader(std::move(entries), result.errors);
  ExperimentConfig& cfg = result.config;

  auto get_double = [&](const std::string& path, double& target) {
    if (const Entry* e = reader.take(path)) {
      if (!parse_double(e->value, target)) reader.error(*e, "expected a number");
    }
  };
  auto get_int = [&](const std::string& path, int& target, long long lo, long long hi) {
    if (const Entry* e = reader.take(path)) {
      long long v;
      if (!parse_int(e->value, v) || v < lo || v > hi)
        reader.error(*e, "expected an integer in [" + std::to_string(lo) + ", " +
                             std::to_string(hi) + "]");
      else
        target = static_cast<int>(v);
    }
  };
  auto get_bool = [&](const std::string& path, bool& target) {
    if (const Entry* e = reader.take(path)) {
      if (e->value == "true")
        target = true;
      else if (e->value == "false")
        target = false;
      else
        reader.error(*e, "expected true or false");
    }
  };

  get_int("problem.L", cfg.problem.n_sites, 1, 20);
  get_double("problem.J", cfg.problem.coupling);
  get_double("problem.g", cfg.problem.field_z);
  get_double("problem.h_max", cfg.problem.field_bound);
  get_double("problem.h_init", cfg.problem.field_initial);
  get_double("problem.h_target", cfg.problem.field_target);
  if (const Entry* e = reader.take("problem.spin_convention")) {
    if (!spin_convention_from_string(e->value, cfg.problem.convention))
      reader.error(*e, "expected pauli or spin_half");
  }
  get_int("problem.max_sites", cfg.problem.max_sites, 2, 14);

  if (const Entry* e = reader.take("sweep.T")) {
    if (!parse_double_list(e->value, cfg.sweep.t_values) || cfg.sweep.t_values.empty())
      reader.error(*e, "expected a number, list or lo:hi:step range");
  } else {
    result.errors.push_back("missing required key 'sweep.T'");
  }
  if (const Entry* e = reader.take("sweep.N_T")) {
    if (!parse_int_list(e->value, cfg.sweep.nt_values) || cfg.sweep.nt_values.empty())
      reader.error(*e, "expected an integer, list or range");
  } else {
    result.errors.push_back("missing required key 'sweep.N_T'");
  }
  if (const Entry* e = reader.take("sweep.k")) {
    if (!parse_int_list(e->value, cfg.sweep.k_values) || cfg.sweep.k_values.empty())
      reader.error(*e, "expected an integer, list or range");
  }
  get_int("sweep.M", cfg.sweep.samples, 1, 10000000);

  auto& an = cfg.analysis;
  get_bool("analysis.order_parameters", an.order_parameters);
  get_bool("analysis.dos", an.dos);
  get_bool("analysis.couplings", an.couplings);
  get_bool("analysis.fits", an.fits);
  get_bool("analysis.embedding", an.embedding);
  get_bool("analysis.complexity", an.complexity);
  if (const Entry* e = reader.take("analysis.fidelity_filter")) {
    double v;
    if (e->value == "none")
      an.fidelity_filter.reset();
    else if (parse_double(e->value, v) && v > 0.0 && v <= 1.0)
      an.fidelity_filter = v;
    else
      reader.error(*e, "expected none or a fraction in (0, 1]");
  }
  get_int("analysis.dos_bins", an.dos_bins, 1, 100000);
  if (const Entry* e = reader.take("analysis.excitation_orders")) {
    if (!parse_int_list(e->value, an.excitation_orders) || an.excitation_orders.empty())
      reader.error(*e, "expected a list of flip orders");
  }
  get_int("analysis.low_manifold_size", an.low_manifold_size, 8, 100000000);
  if (const Entry* e = reader.take("analysis.fit_orders")) {
    if (!parse_int_list(e->value, an.fit_orders) || an.fit_orders.empty())
      reader.error(*e, "expected a list of interaction orders");
    for (int o : an.fit_orders)
      if (o < 1 || o > 3) reader.error(*e, "fit orders must lie in {1, 2, 3}");
  }
  get_int("analysis.complexity_runs", an.complexity_runs, 1, 100000000);
  get_int("analysis.embedding_points", an.embedding_points, 8, 100000);
  get_int("analysis.embedding_attempts_factor", an.embedding_attempts_factor, 1, 100);
  get_double("analysis.tsne_perplexity", an.tsne_perplexity);
  get_int("analysis.tsne_iterations", an.tsne_iterations, 1, 100000);
  get_double("analysis.tsne_learning_rate", an.tsne_learning_rate);
  get_double("analysis.cluster_dc_quantile", an.cluster_dc_quantile);
  if (const Entry* e = reader.take("analysis.cluster_centers")) {
    long long v;
    if (e->value == "auto")
      an.cluster_centers.reset();
    else if (parse_int(e->value, v) && v >= 1)
      an.cluster_centers = static_cast<int>(v);
    else
      reader.error(*e, "expected auto or a positive integer");
  }

  if (const Entry* e = reader.take("seed")) {
    unsigned long long v = 0;
    const char* begin = e->value.data();
    auto res = std::from_chars(begin, begin + e->value.size(), v);
    if (res.ec != std::errc{} || res.ptr != begin + e->value.size())
      reader.error(*e, "expected an unsigned integer");
    else
      cfg.seed = v;
  }
  if (const Entry* e = reader.take("output_dir")) cfg.output_dir = e->value;
  get_int("max_enum_nt", cfg.max_enum_bangs, 1, 30);
  get_int("threads", cfg.threads, 1, 1024);

  reader.finish();

  // cross-field validation, still collecting every violation
  for (const auto& v : cfg.problem.validate()) result.errors.push_back("problem: " + v);
  for (double t : cfg.sweep.t_values)
    if (t < 0) result.errors.push_back("sweep.T values must be >= 0");
  for (int nt : cfg.sweep.nt_values) {
    if (nt < 1) result.errors.push_back("sweep.N_T values must be >= 1 (k-flip moves need bangs)");
    if (nt > 4096) result.errors.push_back("sweep.N_T values above 4096 are not supported");
  }
  for (int k : cfg.sweep.k_values) {
    if (k < 1 || k > 8) result.errors.push_back("sweep.k values must lie in [1, 8]");
    for (int nt : cfg.sweep.nt_values)
      if (k > nt)
        result.errors.push_back("sweep.k = " + std::to_string(k) +
                                " exceeds N_T = " + std::to_string(nt));
  }
  if (an.dos || an.couplings || an.fits || an.complexity) {
    for (int nt : cfg.sweep.nt_values)
      if (nt > cfg.max_enum_bangs)
        result.errors.push_back(
            "enumeration-based analyses (dos/couplings/fits/complexity) need N_T <= "
            "max_enum_nt = " +
            std::to_string(cfg.max_enum_bangs) + ", got " + std::to_string(nt));
  }
  if (an.tsne_perplexity <= 1.0)
    result.errors.push_back("analysis.tsne_perplexity must exceed 1");
  if (an.embedding && an.tsne_perplexity >= an.embedding_points - 1)
    result.errors.push_back("analysis.tsne_perplexity must be below embedding_points - 1");
  if (an.tsne_learning_rate <= 0)
    result.errors.push_back("analysis.tsne_learning_rate must be positive");
  if (an.cluster_dc_quantile <= 0 || an.cluster_dc_quantile >= 1)
    result.errors.push_back("analysis.cluster_dc_quantile must lie in (0, 1)");

  std::sort(result.errors.begin(), result.errors.end());
  result.errors.erase(std::unique(result.errors.begin(), result.errors.end()),
                      result.errors.end());
  return result;
}

namespace {

std::string render_int_list(const std::vector<int>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    s += std::to_string(v[i]);
  }
  return s + "]";
}

std::string render_double_list(const std::vector<double>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    s += io::format_double(v[i]);
  }
  return s + "]";
}

}  // namespace

std::string serialize_config(const ExperimentConfig& cfg) {
  std::ostringstream out;
  out << "seed = " << cfg.seed << "\n";
  out << "output_dir = " << cfg.output_dir << "\n";
  out << "max_enum_nt = " << cfg.max_enum_bangs << "\n";
  out << "threads = " << cfg.threads << "\n";
  out << "problem {\n";
  out << "  L = " << cfg.problem.n_sites << "\n";
  out << "  J = " << io::format_double(cfg.problem.coupling) << "\n";
  out << "  g = " << io::format_double(cfg.problem.field_z) << "\n";
  out << "  h_max = " << io::format_double(cfg.problem.field_bound) << "\n";
  out << "  h_init = " << io::format_double(cfg.problem.field_initial) << "\n";
  out << "  h_target = " << io::format_double(cfg.problem.field_target) << "\n";
  out << "  spin_convention = " << to_string(cfg.problem.convention) << "\n";
  out << "  max_sites = " << cfg.problem.max_sites << "\n";
  out << "}\n";
  out << "sweep {\n";
  out << "  T = " << render_double_list(cfg.sweep.t_values) << "\n";
  out << "  N_T = " << render_int_list(cfg.sweep.nt_values) << "\n";
  out << "  k = " << render_int_list(cfg.sweep.k_values) << "\n";
  out << "  M = " << cfg.sweep.samples << "\n";
  out << "}\n";
  const auto& an = cfg.analysis;
  out << "analysis {\n";
  out << "  order_parameters = " << (an.order_parameters ? "true" : "false") << "\n";
  out << "  dos = " << (an.dos ? "true" : "false") << "\n";
  out << "  couplings = " << (an.couplings ? "true" : "false") << "\n";
  out << "  fits = " << (an.fits ? "true" : "false") << "\n";
  out << "  embedding = " << (an.embedding ? "true" : "false") << "\n";
  out << "  complexity = " << (an.complexity ? "true" : "false") << "\n";
  out << "  fidelity_filter = "
      << (an.fidelity_filter ? io::format_double(*an.fidelity_filter) : "none") << "\n";
  out << "  dos_bins = " << an.dos_bins << "\n";
  out << "  excitation_orders = " << render_int_list(an.excitation_orders) << "\n";
  out << "  low_manifold_size = " << an.low_manifold_size << "\n";
  out << "  fit_orders = " << render_int_list(an.fit_orders) << "\n";
  out << "  complexity_runs = " << an.complexity_runs << "\n";
  out << "  embedding_points = " << an.embedding_points << "\n";
  out << "  embedding_attempts_factor = " << an.embedding_attempts_factor << "\n";
  out << "  tsne_perplexity = " << io::format_double(an.tsne_perplexity) << "\n";
  out << "  tsne_iterations = " << an.tsne_iterations << "\n";
  out << "  tsne_learning_rate = " << io::format_double(an.tsne_learning_rate) << "\n";
  out << "  cluster_dc_quantile = " << io::format_double(an.cluster_dc_quantile) << "\n";
  out << "  cluster_centers = "
      << (an.cluster_centers ? std::to_string(*an.cluster_centers) : "auto") << "\n";
  out << "}\n";
  return out.str();
}

}  // namespace qcland
