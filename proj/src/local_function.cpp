#include "rwdre/local_function.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

namespace rwdre {
namespace {

std::vector<double> to_doubles(const std::vector<Rational>& v) {
  std::vector<double> out(v.size());
  std::transform(v.begin(), v.end(), out.begin(), [](const Rational& r) { return to_double(r); });
  return out;
}

}  // namespace

LocalFunction::LocalFunction(std::vector<int> support, std::vector<double> table)
    : support_(std::move(support)), table_(std::move(table)) {
  check_support();
}

LocalFunction::LocalFunction(std::vector<int> support, std::vector<Rational> table)
    : support_(std::move(support)), table_(to_doubles(table)), exact_(std::move(table)) {
  check_support();
}

void LocalFunction::check_support() const {
  if (support_.size() > 20) throw std::invalid_argument("LocalFunction: support too large");
  auto sorted = support_;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw std::invalid_argument("LocalFunction: repeated offset in support");
  if (table_.size() != (std::size_t{1} << support_.size()))
    throw std::invalid_argument("LocalFunction: table must have 2^|support| entries");
}

LocalFunction LocalFunction::constant(Rational value) {
  return LocalFunction({}, std::vector<Rational>{value});
}

LocalFunction LocalFunction::occupation_product(const std::vector<int>& offsets) {
  std::vector<Rational> table(std::size_t{1} << offsets.size(), Rational(0));
  table.back() = Rational(1);
  return LocalFunction(offsets, std::move(table));
}

const std::vector<Rational>& LocalFunction::exact_table() const {
  if (!exact_) throw std::logic_error("LocalFunction: no exact table");
  return *exact_;
}

unsigned LocalFunction::window_index(const Configuration& eta, int x) const noexcept {
  const int n = eta.size();
  unsigned idx = 0;
  for (std::size_t i = 0; i < support_.size(); ++i) {
    int s = (x + support_[i]) % n;
    if (s < 0) s += n;
    idx |= static_cast<unsigned>(eta[s]) << i;
  }
  return idx;
}

Polynomial<Rational> LocalFunction::mean_polynomial() const {
  const auto& table = exact_table();
  const Polynomial<Rational> occupied({Rational(0), Rational(1)});
  const Polynomial<Rational> empty({Rational(1), Rational(-1)});
  Polynomial<Rational> total;
  for (std::size_t idx = 0; idx < table.size(); ++idx) {
    if (table[idx] == Rational(0)) continue;
    auto term = Polynomial<Rational>::constant(table[idx]);
    for (std::size_t i = 0; i < support_.size(); ++i)
      term = term * (((idx >> i) & 1u) ? occupied : empty);
    total += term;
  }
  return total;
}

double LocalFunction::mean(double rho) const {
  double total = 0.0;
  for (std::size_t idx = 0; idx < table_.size(); ++idx) {
    double w = table_[idx];
    for (std::size_t i = 0; i < support_.size(); ++i) w *= ((idx >> i) & 1u) ? rho : 1.0 - rho;
    total += w;
  }
  return total;
}

std::vector<std::uint64_t> LocalFunction::canonical_counts(int k, int ell) const {
  if (ell < 1 || ell > kMaxCanonicalSize)
    throw std::invalid_argument("canonical_average: ell outside [1, 24]");
  if (k < 0 || k > ell) throw std::invalid_argument("canonical_average: k outside [0, ell]");
  for (int s : support_)
    if (s < 1 || s > ell) throw std::invalid_argument("canonical_average: support not inside 1..ell");

  std::vector<std::uint64_t> counts(table_.size(), 0);
  auto tally = [&](std::uint32_t mask) {
    unsigned idx = 0;
    for (std::size_t i = 0; i < support_.size(); ++i)
      idx |= ((mask >> (support_[i] - 1)) & 1u) << i;
    ++counts[idx];
  };
  if (k == 0) {
    tally(0);
    return counts;
  }
  const std::uint32_t limit = std::uint32_t{1} << ell;
  // Gosper's hack: next integer with the same popcount.
  for (std::uint32_t m = (std::uint32_t{1} << k) - 1; m < limit;) {
    tally(m);
    const std::uint32_t low = m & (~m + 1);
    const std::uint32_t ripple = m + low;
    m = ripple | (((ripple ^ m) >> 2) / low);
    if (ripple == 0) break;
  }
  return counts;
}

double LocalFunction::canonical_average(int k, int ell) const {
  const auto counts = canonical_counts(k, ell);
  double total = 0.0;
  std::uint64_t n = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    total += static_cast<double>(counts[i]) * table_[i];
    n += counts[i];
  }
  return total / static_cast<double>(n);
}

Rational LocalFunction::canonical_average_exact(int k, int ell) const {
  const auto& table = exact_table();
  const auto counts = canonical_counts(k, ell);
  Rational total(0);
  std::int64_t n = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] == 0) continue;
    total += table[i] * Rational(static_cast<std::int64_t>(counts[i]));
    n += static_cast<std::int64_t>(counts[i]);
  }
  return total / Rational(n);
}

LocalRate::LocalRate(std::vector<int> support, std::vector<Rational> plus, std::vector<Rational> minus)
    : plus_(support, std::move(plus)), minus_(support, std::move(minus)) {
  finish();
}

LocalRate::LocalRate(std::vector<int> support, std::vector<double> plus, std::vector<double> minus)
    : plus_(support, std::move(plus)), minus_(support, std::move(minus)) {
  finish();
}

void LocalRate::finish() {
  normalized_ = true;
  for (std::size_t i = 0; i < plus_.table().size(); ++i) {
    const double p = plus_.table()[i];
    const double m = minus_.table()[i];
    if (!(p >= 0.0) || !(m >= 0.0) || !std::isfinite(p) || !std::isfinite(m))
      throw std::invalid_argument("LocalRate: rates must be finite and non-negative");
    max_plus_ = std::max(max_plus_, p);
    max_minus_ = std::max(max_minus_, m);
    if (plus_.is_exact()) {
      if (plus_.exact_table()[i] + minus_.exact_table()[i] != Rational(1)) normalized_ = false;
    } else if (std::abs(p + m - 1.0) > 1e-12) {
      normalized_ = false;
    }
  }
}

LocalRate LocalRate::intro_example() {
  return LocalRate({0}, {Rational(1, 3), Rational(2, 3)}, {Rational(2, 3), Rational(1, 3)});
}

LocalRate LocalRate::archetype(Rational alpha, Rational beta) {
  return LocalRate({0}, {alpha, beta}, {beta, alpha});
}

LocalRate LocalRate::constant(Rational plus, Rational minus) {
  return LocalRate({}, {plus}, {minus});
}

int LocalRate::min_offset() const noexcept {
  const auto s = support();
  return s.empty() ? 0 : *std::min_element(s.begin(), s.end());
}

int LocalRate::max_offset() const noexcept {
  const auto s = support();
  return s.empty() ? 0 : *std::max_element(s.begin(), s.end());
}

LocalRate LocalRate::parse(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::vector<int> support;
  bool have_support = false;
  std::map<unsigned, std::pair<Rational, Rational>> rows;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string head;
    if (!(ls >> head)) continue;
    if (head == "support") {
      if (have_support) throw std::invalid_argument("LocalRate::parse: repeated support line");
      int o;
      while (ls >> o) support.push_back(o);
      have_support = true;
      continue;
    }
    if (!have_support) throw std::invalid_argument("LocalRate::parse: support line must come first");
    // An empty support has a single window written as "-".
    const std::string bits = head == "-" ? std::string() : head;
    if (bits.size() != support.size())
      throw std::invalid_argument("LocalRate::parse: bit string length differs from support size");
    unsigned idx = 0;
    for (std::size_t i = 0; i < bits.size(); ++i) {
      if (bits[i] != '0' && bits[i] != '1')
        throw std::invalid_argument("LocalRate::parse: bits must be 0/1");
      idx |= static_cast<unsigned>(bits[i] - '0') << i;
    }
    std::string p, m, extra;
    if (!(ls >> p >> m) || (ls >> extra))
      throw std::invalid_argument("LocalRate::parse: expected 'bits c+ c-'");
    if (!rows.emplace(idx, std::make_pair(parse_rational(p), parse_rational(m))).second)
      throw std::invalid_argument("LocalRate::parse: duplicate window " + bits);
  }
  if (!have_support) throw std::invalid_argument("LocalRate::parse: missing support line");
  const std::size_t count = std::size_t{1} << support.size();
  if (rows.size() != count) throw std::invalid_argument("LocalRate::parse: incomplete table");
  std::vector<Rational> plus, minus;
  for (auto& [idx, pm] : rows) {
    plus.push_back(pm.first);
    minus.push_back(pm.second);
  }
  return LocalRate(std::move(support), std::move(plus), std::move(minus));
}

std::string LocalRate::serialize() const {
  std::ostringstream out;
  out << "support";
  for (int o : support()) out << ' ' << o;
  out << '\n';
  out.precision(17);
  for (std::size_t idx = 0; idx < window_count(); ++idx) {
    if (support().empty()) {
      out << '-';
    } else {
      for (std::size_t i = 0; i < support().size(); ++i) out << ((idx >> i) & 1u);
    }
    if (is_exact()) {
      out << ' ' << to_string(plus_.exact_table()[idx]) << ' ' << to_string(minus_.exact_table()[idx]);
    } else {
      out << ' ' << plus_.table()[idx] << ' ' << minus_.table()[idx];
    }
    out << '\n';
  }
  return out.str();
}

MeanFieldVelocity mean_field_velocity(const LocalRate& c, double rho) {
  if (!(rho >= 0.0 && rho <= 1.0)) throw std::invalid_argument("mean_field_velocity: rho outside [0,1]");
  MeanFieldVelocity v;
  v.plus = c.plus().mean(rho);
  v.minus = c.minus().mean(rho);
  v.drift = v.plus - v.minus;
  return v;
}

ExactMeanFieldVelocity mean_field_polynomials(const LocalRate& c) {
  ExactMeanFieldVelocity v;
  v.plus = c.plus().mean_polynomial();
  v.minus = c.minus().mean_polynomial();
  v.drift = v.plus - v.minus;
  return v;
}

}  // namespace rwdre
