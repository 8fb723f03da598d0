#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rwdre/lattice.hpp"
#include "rwdre/polynomial.hpp"
#include "rwdre/rational.hpp"

namespace rwdre {

/// Function of the occupancies on a finite window of offsets. Bit i of a
/// window index is the occupancy at offset support[i]; evaluation at site x
/// reads the shifted configuration, f(tau_x eta).
class LocalFunction {
 public:
  LocalFunction(std::vector<int> support, std::vector<double> table);
  LocalFunction(std::vector<int> support, std::vector<Rational> table);

  static LocalFunction constant(Rational value);
  /// Product of occupancies, e.g. {1, 2} gives xi(1) xi(2).
  static LocalFunction occupation_product(const std::vector<int>& offsets);

  std::span<const int> support() const noexcept { return support_; }
  std::span<const double> table() const noexcept { return table_; }
  bool is_exact() const noexcept { return exact_.has_value(); }
  const std::vector<Rational>& exact_table() const;

  unsigned window_index(const Configuration& eta, int x) const noexcept;
  double operator()(const Configuration& eta, int x = 0) const noexcept {
    return table_[window_index(eta, x)];
  }

  /// Expectation under the product Bernoulli(rho) measure as a polynomial in rho.
  Polynomial<Rational> mean_polynomial() const;
  double mean(double rho) const;

  /// Average over configurations of sites 1..ell carrying exactly k particles.
  double canonical_average(int k, int ell) const;
  Rational canonical_average_exact(int k, int ell) const;

  static constexpr int kMaxCanonicalSize = 24;

 private:
  void check_support() const;
  std::vector<std::uint64_t> canonical_counts(int k, int ell) const;

  std::vector<int> support_;
  std::vector<double> table_;
  std::optional<std::vector<Rational>> exact_;
};

struct RatePair {
  double plus = 0.0;
  double minus = 0.0;
};

/// Jump rate of the walker as a truth table on a window around it.
class LocalRate {
 public:
  LocalRate(std::vector<int> support, std::vector<Rational> plus, std::vector<Rational> minus);
  LocalRate(std::vector<int> support, std::vector<double> plus, std::vector<double> minus);

  /// c+ = (1 + eta(0))/3, c- = (2 - eta(0))/3.
  static LocalRate intro_example();
  /// c+ = alpha + (beta - alpha) eta(0), c- = beta + (alpha - beta) eta(0).
  static LocalRate archetype(Rational alpha, Rational beta);
  static LocalRate constant(Rational plus, Rational minus);

  /// Text block: "support o1 o2 ..." then one "bits c+ c-" line per window.
  static LocalRate parse(std::string_view text);
  std::string serialize() const;

  std::span<const int> support() const noexcept { return plus_.support(); }
  std::size_t window_count() const noexcept { return plus_.table().size(); }
  unsigned window_index(const Configuration& eta, int x) const noexcept {
    return plus_.window_index(eta, x);
  }
  RatePair at_index(unsigned idx) const noexcept {
    return {plus_.table()[idx], minus_.table()[idx]};
  }
  RatePair evaluate(const Configuration& eta, int x) const noexcept {
    return at_index(window_index(eta, x));
  }

  const LocalFunction& plus() const noexcept { return plus_; }
  const LocalFunction& minus() const noexcept { return minus_; }
  double max_plus() const noexcept { return max_plus_; }
  double max_minus() const noexcept { return max_minus_; }
  bool is_exact() const noexcept { return plus_.is_exact(); }
  /// True when c+ + c- == 1 on every window.
  bool normalized() const noexcept { return normalized_; }
  /// Smallest/largest offset in the window (0 if empty).
  int min_offset() const noexcept;
  int max_offset() const noexcept;

 private:
  void finish();

  LocalFunction plus_;
  LocalFunction minus_;
  double max_plus_ = 0.0;
  double max_minus_ = 0.0;
  bool normalized_ = false;
};

struct MeanFieldVelocity {
  double plus = 0.0;
  double minus = 0.0;
  double drift = 0.0;
};

struct ExactMeanFieldVelocity {
  Polynomial<Rational> plus;
  Polynomial<Rational> minus;
  Polynomial<Rational> drift;
};

MeanFieldVelocity mean_field_velocity(const LocalRate& c, double rho);
ExactMeanFieldVelocity mean_field_polynomials(const LocalRate& c);

}  // namespace rwdre
