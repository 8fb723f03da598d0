#include "rwdre/profile.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

namespace rwdre {
namespace {

double wrap_unit(double x) noexcept {
  double r = x - std::floor(x);
  if (r >= 1.0) r = 0.0;
  return r;
}

}  // namespace

DensityProfile::DensityProfile(std::vector<std::pair<double, double>> knots, bool check_range) {
  if (knots.empty()) throw std::invalid_argument("DensityProfile: no knots");
  for (auto& k : knots) {
    if (!std::isfinite(k.first) || !std::isfinite(k.second))
      throw std::invalid_argument("DensityProfile: non-finite knot");
    if (check_range && (k.second < 0.0 || k.second > 1.0))
      throw std::invalid_argument("DensityProfile: value outside [0,1]");
    k.first = wrap_unit(k.first);
  }
  std::sort(knots.begin(), knots.end());
  x_.reserve(knots.size());
  v_.reserve(knots.size());
  for (std::size_t i = 0; i < knots.size(); ++i) {
    if (i > 0 && knots[i].first - knots[i - 1].first < 1e-14)
      throw std::invalid_argument("DensityProfile: repeated knot position");
    x_.push_back(knots[i].first);
    v_.push_back(knots[i].second);
  }
  if (x_.size() > 1 && x_.front() + 1.0 - x_.back() < 1e-14)
    throw std::invalid_argument("DensityProfile: repeated knot position");
  build();
}

DensityProfile DensityProfile::constant(double rho) {
  return DensityProfile({{0.0, rho}});
}

DensityProfile DensityProfile::uniform(std::vector<double> values, bool check_range) {
  if (values.empty()) throw std::invalid_argument("DensityProfile: no knots");
  DensityProfile p;
  const auto m = values.size();
  p.x_.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    if (!std::isfinite(values[i]) || (check_range && (values[i] < 0.0 || values[i] > 1.0)))
      throw std::invalid_argument("DensityProfile: value outside [0,1]");
    p.x_[i] = static_cast<double>(i) / static_cast<double>(m);
  }
  p.v_ = std::move(values);
  p.build();
  return p;
}

DensityProfile DensityProfile::from_function(const std::function<double(double)>& f, int knots) {
  if (knots < 1) throw std::invalid_argument("DensityProfile: knots must be positive");
  std::vector<double> v(static_cast<std::size_t>(knots));
  for (int i = 0; i < knots; ++i) v[static_cast<std::size_t>(i)] = f(static_cast<double>(i) / knots);
  return uniform(std::move(v));
}

DensityProfile DensityProfile::cosine(double mean, double amplitude, int k, int knots) {
  return from_function(
      [=](double x) { return mean + amplitude * std::cos(2.0 * std::numbers::pi * k * x); }, knots);
}

void DensityProfile::build() {
  const auto m = x_.size();
  uniform_ = true;
  for (std::size_t i = 0; i < m && uniform_; ++i)
    uniform_ = std::abs(x_[i] - static_cast<double>(i) / static_cast<double>(m)) < 1e-13;
  cumulative_.assign(m, 0.0);
  total_ = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double xr = i + 1 < m ? x_[i + 1] : x_[0] + 1.0;
    const double vr = i + 1 < m ? v_[i + 1] : v_[0];
    cumulative_[i] = total_;
    total_ += 0.5 * (xr - x_[i]) * (v_[i] + vr);
  }
}

std::size_t DensityProfile::segment(double x) const noexcept {
  const auto m = x_.size();
  if (uniform_) {
    auto i = static_cast<std::size_t>(x * static_cast<double>(m));
    return std::min(i, m - 1);
  }
  if (x < x_[0]) return m - 1;
  return static_cast<std::size_t>(std::upper_bound(x_.begin(), x_.end(), x) - x_.begin()) - 1;
}

double DensityProfile::operator()(double x) const noexcept {
  const auto m = x_.size();
  if (m == 1) return v_[0];
  x = wrap_unit(x);
  const std::size_t i = segment(x);
  double xl = x_[i];
  if (x < xl) x += 1.0;
  const double xr = i + 1 < m ? x_[i + 1] : x_[0] + 1.0;
  const double vr = i + 1 < m ? v_[i + 1] : v_[0];
  const double w = (x - xl) / (xr - xl);
  return v_[i] + w * (vr - v_[i]);
}

double DensityProfile::min_value() const noexcept { return *std::min_element(v_.begin(), v_.end()); }
double DensityProfile::max_value() const noexcept { return *std::max_element(v_.begin(), v_.end()); }

bool DensityProfile::is_interior(double eps) const noexcept {
  return min_value() >= eps && max_value() <= 1.0 - eps;
}

// Integral from x_0 to x_0 + z, 0 <= z < 1.
double DensityProfile::primitive(double z) const noexcept {
  const auto m = x_.size();
  const double y = x_[0] + z;
  std::size_t i;
  if (y >= 1.0) {
    i = m - 1;
  } else {
    i = segment(y);
  }
  const double xl = x_[i];
  const double xr = i + 1 < m ? x_[i + 1] : x_[0] + 1.0;
  const double vr = i + 1 < m ? v_[i + 1] : v_[0];
  const double d = y - xl;
  const double slope = (vr - v_[i]) / (xr - xl);
  return cumulative_[i] + d * (v_[i] + 0.5 * slope * d);
}

double DensityProfile::integral(double a, double b) const noexcept {
  auto G = [&](double y) {
    const double s = y - x_[0];
    const double turns = std::floor(s);
    double frac = s - turns;
    if (frac >= 1.0) frac = 0.0;
    return turns * total_ + primitive(frac);
  };
  return G(b) - G(a);
}

double DensityProfile::cell_average(int site, int n) const noexcept {
  const double h = 1.0 / n;
  const double x = site * h;
  return n * integral(x - 0.5 * h, x + 0.5 * h);
}

std::vector<double> DensityProfile::cell_averages(int n) const {
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = std::clamp(cell_average(i, n), 0.0, 1.0);
  return out;
}

std::pair<double, double> DensityProfile::fourier_moment(int k) const noexcept {
  const auto m = x_.size();
  if (k == 0) return {total_, 0.0};
  const double omega = 2.0 * std::numbers::pi * k;
  if (uniform_) {
    const double arg = std::numbers::pi * k / static_cast<double>(m);
    const double sinc = std::sin(arg) / arg;
    double c = 0.0, s = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      const double phase = omega * x_[j];
      c += v_[j] * std::cos(phase);
      s += v_[j] * std::sin(phase);
    }
    const double w = sinc * sinc / static_cast<double>(m);
    return {c * w, s * w};
  }
  using C = std::complex<double>;
  const C iw(0.0, omega);
  C acc(0.0, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    const double a = x_[i];
    const double b = i + 1 < m ? x_[i + 1] : x_[0] + 1.0;
    const double vb = i + 1 < m ? v_[i + 1] : v_[0];
    const double h = b - a;
    const C eh = std::exp(iw * h);
    const C i0 = (eh - 1.0) / iw;
    const C i1 = h * eh / iw - i0 / iw;
    acc += std::exp(iw * a) * (v_[i] * i0 + (vb - v_[i]) / h * i1);
  }
  return {acc.real(), acc.imag()};
}

DensityProfile DensityProfile::shifted(double s) const {
  if (s == 0.0) return *this;
  const auto m = x_.size();
  if (uniform_) {
    const double steps = s * static_cast<double>(m);
    const double r = std::round(steps);
    if (std::abs(steps - r) < 1e-9) {
      auto k = static_cast<long long>(r) % static_cast<long long>(m);
      if (k < 0) k += static_cast<long long>(m);
      std::vector<double> v(m);
      std::rotate_copy(v_.begin(), v_.begin() + k, v_.end(), v.begin());
      return uniform(std::move(v), false);
    }
  }
  std::vector<std::pair<double, double>> knots(m);
  for (std::size_t i = 0; i < m; ++i) knots[i] = {x_[i] - s, v_[i]};
  return DensityProfile(std::move(knots), false);
}

std::vector<double> DensityProfile::breakpoints(double a, double b) const {
  std::vector<double> out;
  if (x_.size() <= 1 || b <= a) return out;
  for (double base = std::floor(a); base <= b; base += 1.0)
    for (double x : x_) {
      const double y = base + x;
      if (y > a && y < b) out.push_back(y);
    }
  std::sort(out.begin(), out.end());
  return out;
}

double tent_average(const std::function<double(double)>& g, double x, int n,
                    const std::vector<double>& breaks) {
  using Gauss = boost::math::quadrature::gauss<double, 7>;
  const double h = 1.0 / n;
  std::vector<double> pts{x - h, x, x + h};
  for (double b : breaks)
    if (b > x - h && b < x + h) pts.push_back(b);
  std::sort(pts.begin(), pts.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    if (pts[i + 1] - pts[i] <= 0.0) continue;
    total += Gauss::integrate(
        [&](double y) { return (1.0 - n * std::abs(y - x)) * g(y); }, pts[i], pts[i + 1]);
  }
  return n * total;
}

}  // namespace rwdre
