#include "qcland/control_problem.hpp"

#include <cmath>
#include <stdexcept>

namespace qcland {

std::string to_string(SpinConvention c) {
  return c == SpinConvention::pauli ? "pauli" : "spin_half";
}

bool spin_convention_from_string(const std::string& s, SpinConvention& out) {
  if (s == "pauli") {
    out = SpinConvention::pauli;
    return true;
  }
  if (s == "spin_half") {
    out = SpinConvention::spin_half;
    return true;
  }
  return false;
}

std::vector<std::string> ControlProblem::validate() const {
  std::vector<std::string> v;
  if (n_sites < 2) v.push_back("L must be >= 2");
  if (n_sites > max_sites)
    v.push_back("L exceeds the dense-matrix cap (" + std::to_string(max_sites) + ")");
  if (n_bangs < 0) v.push_back("N_T must be >= 0");
  if (duration < 0.0) v.push_back("T must be >= 0");
  if (field_bound <= 0.0) v.push_back("h_max must be > 0");
  if (std::abs(field_initial) > field_bound) v.push_back("|h_init| must be <= h_max");
  if (std::abs(field_target) > field_bound) v.push_back("|h_target| must be <= h_max");
  return v;
}

Protocol random_protocol(int n_bangs, Rng& rng) {
  Protocol p(static_cast<std::size_t>(n_bangs));
  for (auto& b : p) b = rng.coin() ? 1 : -1;
  return p;
}

std::string protocol_string(const Protocol& p) {
  std::string s;
  s.reserve(p.size());
  for (auto b : p) s.push_back(b > 0 ? '+' : '-');
  return s;
}

Protocol protocol_from_string(const std::string& s) {
  Protocol p;
  p.reserve(s.size());
  for (char c : s) {
    if (c == '+')
      p.push_back(1);
    else if (c == '-')
      p.push_back(-1);
    else
      throw std::invalid_argument("protocol string may contain only '+' and '-'");
  }
  return p;
}

std::uint64_t protocol_index(const Protocol& p) {
  if (p.size() > 63) throw std::invalid_argument("protocol too long for 64-bit indexing");
  std::uint64_t s = 0;
  for (std::size_t j = 0; j < p.size(); ++j)
    if (p[j] < 0) s |= (std::uint64_t{1} << j);
  return s;
}

Protocol protocol_from_index(std::uint64_t index, int n_bangs) {
  Protocol p(static_cast<std::size_t>(n_bangs));
  for (int j = 0; j < n_bangs; ++j) p[j] = (index >> j) & 1 ? -1 : 1;
  return p;
}

}  // namespace qcland
