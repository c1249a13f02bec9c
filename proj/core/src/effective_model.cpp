#include "qcland/effective_model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "qcland/combinatorics.hpp"

namespace qcland {

void fwht_inplace(std::span<double> data) {
  const std::size_t n = data.size();
  if (n == 0 || (n & (n - 1)) != 0)
    throw std::invalid_argument("transform length must be a power of two");
  for (std::size_t half = 1; half < n; half <<= 1) {
    for (std::size_t block = 0; block < n; block += 2 * half) {
      for (std::size_t i = block; i < block + half; ++i) {
        const double a = data[i];
        const double b = data[i + half];
        data[i] = a + b;
        data[i + half] = a - b;
      }
    }
  }
}

CouplingTable::CouplingTable(int n_bangs, std::vector<double> coefficients)
    : n_(n_bangs), coeff_(std::move(coefficients)) {
  if (coeff_.size() != (std::size_t{1} << n_))
    throw std::invalid_argument("coefficient vector must have 2^N_T entries");
}

Eigen::VectorXd CouplingTable::field_vector() const {
  Eigen::VectorXd g(n_);
  for (int j = 0; j < n_; ++j) g(j) = field(j);
  return g;
}

Eigen::MatrixXd CouplingTable::pair_matrix() const {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n_, n_);
  for (int i = 0; i < n_; ++i)
    for (int j = i + 1; j < n_; ++j) m(i, j) = m(j, i) = pair(i, j);
  return m;
}

std::vector<CouplingTable::Triple> CouplingTable::triples() const {
  std::vector<Triple> out;
  out.reserve(binomial(n_, 3));
  for_each_combination(n_, 3, [&](const std::vector<int>& c) {
    out.push_back({{c[0], c[1], c[2]}, triple(c[0], c[1], c[2])});
  });
  return out;
}

CouplingTable walsh_couplings(std::span<const double> cost_table) {
  const std::size_t size = cost_table.size();
  if (size == 0 || (size & (size - 1)) != 0)
    throw std::invalid_argument("cost table length must be a power of two");
  std::vector<double> coeff(cost_table.begin(), cost_table.end());
  fwht_inplace(coeff);
  const double scale = 1.0 / static_cast<double>(size);
  for (auto& c : coeff) c *= scale;
  return CouplingTable(std::countr_zero(size), std::move(coeff));
}

CouplingTable coupling_table_from_terms(int n_bangs, double constant,
                                        const Eigen::VectorXd& field,
                                        const Eigen::MatrixXd& pair,
                                        std::span<const CouplingTable::Triple> triples) {
  std::vector<double> coeff(std::size_t{1} << n_bangs, 0.0);
  coeff[0] = constant;
  for (int j = 0; j < n_bangs; ++j)
    if (j < field.size()) coeff[std::uint64_t{1} << j] = field(j);
  for (int i = 0; i < n_bangs && i < pair.rows(); ++i)
    for (int j = i + 1; j < n_bangs && j < pair.cols(); ++j)
      coeff[(std::uint64_t{1} << i) | (std::uint64_t{1} << j)] = pair(i, j);
  for (const auto& t : triples) {
    std::uint64_t m = 0;
    for (int s : t.sites) m |= std::uint64_t{1} << s;
    if (std::popcount(m) != 3) throw std::invalid_argument("triple sites must be distinct");
    coeff[m] = t.value;
  }
  return CouplingTable(n_bangs, std::move(coeff));
}

namespace {

std::uint32_t order_mask(std::span<const int> orders, int n) {
  std::uint32_t mask = 0;
  for (int o : orders) {
    if (o < 0 || o > n) throw std::invalid_argument("interaction order out of range");
    mask |= 1u << o;
  }
  return mask;
}

}  // namespace

std::vector<double> truncated_spectrum(const CouplingTable& table,
                                       std::span<const int> orders) {
  const std::uint32_t keep = order_mask(orders, table.n_bangs());
  std::vector<double> coeff = table.coefficients();
  for (std::size_t m = 0; m < coeff.size(); ++m)
    if (!(keep & (1u << std::popcount(m)))) coeff[m] = 0.0;
  fwht_inplace(coeff);
  return coeff;
}

double truncated_energy(const CouplingTable& table, std::span<const int> orders,
                        const Protocol& protocol) {
  const int n = table.n_bangs();
  if (static_cast<int>(protocol.size()) != n)
    throw std::invalid_argument("protocol length does not match the table");
  const std::uint32_t keep = order_mask(orders, n);
  int max_order = 0;
  for (int o = 0; o <= n; ++o)
    if (keep & (1u << o)) max_order = o;

  if (max_order <= 3) {
    double e = 0.0;
    if (keep & 1u) e += table.constant();
    if (keep & 2u)
      for (int j = 0; j < n; ++j) e += table.field(j) * protocol[j];
    if (keep & 4u)
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
          e += table.pair(i, j) * protocol[i] * protocol[j];
    if (keep & 8u)
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
          for (int k = j + 1; k < n; ++k)
            e += table.triple(i, j, k) * protocol[i] * protocol[j] * protocol[k];
    return e;
  }

  const std::uint64_t s = protocol_index(protocol);
  double e = 0.0;
  const auto& coeff = table.coefficients();
  for (std::size_t m = 0; m < coeff.size(); ++m) {
    if (!(keep & (1u << std::popcount(m)))) continue;
    e += (std::popcount(m & s) & 1) ? -coeff[m] : coeff[m];
  }
  return e;
}

double truncation_error(std::span<const double> cost_table, const CouplingTable& table,
                        std::span<const int> orders) {
  if (cost_table.size() != table.coefficients().size())
    throw std::invalid_argument("cost table and coupling table sizes differ");
  const std::vector<double> approx = truncated_spectrum(table, orders);
  double acc = 0.0;
  for (std::size_t s = 0; s < cost_table.size(); ++s)
    acc += std::abs(cost_table[s] - approx[s]);
  return acc / static_cast<double>(cost_table.size());
}

double frustration(const CouplingTable& table, std::span<const int> orders) {
  const std::uint32_t keep = order_mask(orders, table.n_bangs());
  if (keep & 1u)
    throw std::invalid_argument("frustration excludes the constant term (order 0)");
  double sum_abs = 0.0;
  const auto& coeff = table.coefficients();
  for (std::size_t m = 1; m < coeff.size(); ++m)
    if (keep & (1u << std::popcount(m))) sum_abs += std::abs(coeff[m]);
  if (sum_abs == 0.0)
    throw std::invalid_argument("frustration is undefined for an all-zero coupling set");
  const std::vector<double> spectrum = truncated_spectrum(table, orders);
  const double lowest = *std::min_element(spectrum.begin(), spectrum.end());
  return (lowest + sum_abs) / sum_abs;
}

LocalityCurve three_body_locality(const CouplingTable& table) {
  const int n = table.n_bangs();
  // perimeter |i-j|+|j-k|+|k-i| = 2(k-i) for ordered i<j<k
  std::vector<double> acc(std::max(0, 2 * n), 0.0);
  std::vector<std::int64_t> cnt(std::max(0, 2 * n), 0);
  for_each_combination(n, 3, [&](const std::vector<int>& c) {
    const int p = 2 * (c[2] - c[0]);
    acc[p] += std::abs(table.triple(c[0], c[1], c[2]));
    ++cnt[p];
  });
  LocalityCurve curve;
  for (int p = 0; p < static_cast<int>(cnt.size()); ++p) {
    if (cnt[p] == 0) continue;
    curve.perimeter.push_back(p);
    curve.mean_abs.push_back(acc[p] / cnt[p]);
    curve.count.push_back(cnt[p]);
  }
  return curve;
}

AveragedCouplings averaged_couplings(std::span<const double> cost_table, int n_bangs,
                                     double field_bound) {
  const std::size_t size = cost_table.size();
  if (size != (std::size_t{1} << n_bangs))
    throw std::invalid_argument("cost table length must be 2^N_T");
  const double norm = 1.0 / static_cast<double>(size);
  const double nt = static_cast<double>(n_bangs);

  AveragedCouplings avg;
  avg.field = Eigen::VectorXd::Zero(n_bangs);
  avg.pair = Eigen::MatrixXd::Zero(n_bangs, n_bangs);

  std::vector<double> h(n_bangs);
  for (std::size_t s = 0; s < size; ++s) {
    const double c = cost_table[s];
    avg.constant += c;
    for (int j = 0; j < n_bangs; ++j)
      h[j] = (s >> j) & 1 ? -field_bound : field_bound;
    for (int j = 0; j < n_bangs; ++j) avg.field(j) += c * h[j];
    for (int i = 0; i < n_bangs; ++i)
      for (int j = i + 1; j < n_bangs; ++j) avg.pair(i, j) += c * h[i] * h[j];
  }
  avg.constant *= norm;
  avg.field *= norm;  // 1/1!
  avg.pair *= norm * nt / 2.0;
  for (int i = 0; i < n_bangs; ++i)
    for (int j = i + 1; j < n_bangs; ++j) avg.pair(j, i) = avg.pair(i, j);

  for_each_combination(n_bangs, 3, [&](const std::vector<int>& idx) {
    double acc = 0.0;
    for (std::size_t s = 0; s < size; ++s) {
      double prod = cost_table[s];
      for (int j : idx) prod *= (s >> j) & 1 ? -field_bound : field_bound;
      acc += prod;
    }
    avg.triples.push_back(
        {{idx[0], idx[1], idx[2]}, acc * norm * nt * nt / 6.0});
  });
  return avg;
}

}  // namespace qcland
