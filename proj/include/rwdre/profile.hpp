#pragma once

#include <functional>
#include <utility>
#include <vector>

namespace rwdre {

/// Periodic piecewise-linear function on the unit circle given by knots
/// 0 <= x_0 < x_1 < ... < x_{m-1} < 1. Used for initial data, empirical
/// densities (knots at the sites) and hydrodynamic frames.
class DensityProfile {
 public:
  DensityProfile() = default;
  /// Knots are wrapped into [0,1) and sorted. Values must lie in [0,1]
  /// unless check_range is false.
  DensityProfile(std::vector<std::pair<double, double>> knots, bool check_range = true);

  static DensityProfile constant(double rho);
  /// Values at the uniform knots i/m.
  static DensityProfile uniform(std::vector<double> values, bool check_range = true);
  static DensityProfile from_function(const std::function<double(double)>& f, int knots);
  /// mean + amplitude cos(2 pi k x) sampled on m uniform knots.
  static DensityProfile cosine(double mean, double amplitude, int k = 1, int knots = 512);

  std::size_t knot_count() const noexcept { return x_.size(); }
  const std::vector<double>& knot_positions() const noexcept { return x_; }
  const std::vector<double>& knot_values() const noexcept { return v_; }
  bool is_uniform() const noexcept { return uniform_; }

  double operator()(double x) const noexcept;
  double min_value() const noexcept;
  double max_value() const noexcept;
  /// eps <= value <= 1 - eps everywhere.
  bool is_interior(double eps) const noexcept;

  /// Exact integral over [a, b] of the periodic extension (b >= a).
  double integral(double a, double b) const noexcept;
  double mass() const noexcept { return total_; }
  /// n * integral over the cell [x - 1/(2n), x + 1/(2n)] around site i/n.
  double cell_average(int site, int n) const noexcept;
  std::vector<double> cell_averages(int n) const;

  /// Exact integrals against cos(2 pi k x) and sin(2 pi k x).
  std::pair<double, double> fourier_moment(int k) const noexcept;

  /// Profile y -> value(y + s).
  DensityProfile shifted(double s) const;
  /// Breakpoints of this profile inside [a, b], in increasing order.
  std::vector<double> breakpoints(double a, double b) const;

 private:
  void build();
  double primitive(double x) const noexcept;
  std::size_t segment(double x) const noexcept;

  std::vector<double> x_;
  std::vector<double> v_;
  std::vector<double> cumulative_;
  double total_ = 0.0;
  bool uniform_ = false;
};

/// Periodic Gauss-Legendre average n * integral of (1 - n|y - x|)^+ g(y) dy,
/// split at the given breakpoints.
double tent_average(const std::function<double(double)>& g, double x, int n,
                    const std::vector<double>& breaks = {});

}  // namespace rwdre
