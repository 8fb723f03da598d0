#pragma once

#include <functional>
#include <string>
#include <vector>

namespace rwdre {

/// Scalar C^1 function of time with its derivative.
class TimeFunction {
 public:
  TimeFunction()
      : value_([](double) { return 0.0; }),
        derivative_([](double) { return 0.0; }),
        constant_(true),
        description_("constant 0") {}

  static TimeFunction constant(double value);
  /// sum_j c_j t^j.
  static TimeFunction polynomial(std::vector<double> coefficients);
  /// Piecewise-linear interpolation of samples; the derivative is the
  /// one-sided slope of the segment containing t.
  static TimeFunction sampled(std::vector<double> times, std::vector<double> values);
  static TimeFunction custom(std::function<double(double)> value, std::function<double(double)> derivative,
                             double sup_abs, std::string description = "custom");

  double operator()(double t) const { return value_(t); }
  double derivative(double t) const { return derivative_(t); }
  /// Upper bound on |a(t)| over the horizon of interest.
  double sup_abs() const noexcept { return sup_abs_; }
  bool is_constant() const noexcept { return constant_; }
  double constant_value() const noexcept { return constant_value_; }
  bool is_zero() const noexcept { return constant_ && constant_value_ == 0.0; }
  const std::string& description() const noexcept { return description_; }

 private:
  std::function<double(double)> value_;
  std::function<double(double)> derivative_;
  double sup_abs_ = 0.0;
  bool constant_ = false;
  double constant_value_ = 0.0;
  std::string description_;
};

enum class Trig { cosine, sine };

/// One spatial Fourier mode times a Chebyshev polynomial in rescaled time.
struct TestFunctionTerm {
  Trig kind = Trig::cosine;
  int k = 1;       // spatial frequency, trig(2 pi k x)
  int degree = 0;  // Chebyshev T_j(2t/T - 1)
  double coefficient = 0.0;
};

/// Smooth space-time test function H(t, x) given as a finite sum of
/// separable terms. Every derivative is exact.
class TestFunctionH {
 public:
  TestFunctionH() = default;
  explicit TestFunctionH(double horizon, std::vector<TestFunctionTerm> terms = {});

  static TestFunctionH cosine_mode(double horizon, int k, double amplitude);
  /// A spatially constant function lambda(t) = amplitude T_degree(2t/T - 1).
  static TestFunctionH spatially_constant(double horizon, double amplitude, int degree = 0);

  double horizon() const noexcept { return horizon_; }
  const std::vector<TestFunctionTerm>& terms() const noexcept { return terms_; }
  void add(const TestFunctionTerm& term);
  bool is_zero() const noexcept;
  bool time_independent() const noexcept;

  double value(double t, double x) const;
  double dt(double t, double x) const;
  double dx(double t, double x) const;
  double laplacian(double t, double x) const;

  /// Upper bounds over [0, T] x circle.
  double sup_abs_dx() const noexcept;
  double sup_abs_laplacian() const noexcept;

  /// Time coefficient of each term at t (T_j value times coefficient).
  void time_coefficients(double t, std::vector<double>& out) const;
  /// n * integral of delta_y^n times the spatial factor of each term, at site y = i/n.
  std::vector<std::vector<double>> site_projections(int n) const;

  std::string describe() const;

 private:
  double horizon_ = 1.0;
  std::vector<TestFunctionTerm> terms_;
};

/// Chebyshev T_j and its derivative at s in [-1, 1].
double chebyshev(int j, double s) noexcept;
double chebyshev_derivative(int j, double s) noexcept;

}  // namespace rwdre
