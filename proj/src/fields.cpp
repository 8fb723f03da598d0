#include "rwdre/fields.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>

namespace rwdre {

DensityProfile empirical_density(const Configuration& eta) {
  std::vector<double> v(eta.occupancy().begin(), eta.occupancy().end());
  return DensityProfile::uniform(std::move(v));
}

double block_average(const DensityProfile& pi, double x, double eps) {
  if (!(eps > 0.0 && eps < 0.5)) throw std::invalid_argument("block_average: eps must lie in (0, 1/2)");
  return pi.integral(x, x + eps) / eps;
}

double l1_distance(const DensityProfile& a, const DensityProfile& b) {
  std::vector<double> xs = a.knot_positions();
  xs.insert(xs.end(), b.knot_positions().begin(), b.knot_positions().end());
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end(), [](double p, double q) { return q - p < 1e-15; }), xs.end());
  double total = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double x0 = xs[i];
    const double x1 = i + 1 < xs.size() ? xs[i + 1] : xs[0] + 1.0;
    const double d0 = a(x0) - b(x0);
    const double d1 = a(x1) - b(x1);
    const double h = x1 - x0;
    if (d0 * d1 >= 0.0) {
      total += 0.5 * h * (std::abs(d0) + std::abs(d1));
    } else {
      total += 0.5 * h * (d0 * d0 + d1 * d1) / (std::abs(d0) + std::abs(d1));
    }
  }
  return total;
}

double block_l1_distance(const DensityProfile& a, const DensityProfile& b, double eps, int points) {
  if (points < 1) throw std::invalid_argument("block_l1_distance: points must be positive");
  double total = 0.0;
  for (int i = 0; i < points; ++i) {
    const double x = (i + 0.5) / points;
    total += std::abs(block_average(a, x, eps) - block_average(b, x, eps));
  }
  return total / points;
}

DiscreteMeasure DiscreteMeasure::from_configuration(const Configuration& eta) {
  DiscreteMeasure m;
  const int n = eta.size();
  for (int x = 0; x < n; ++x)
    if (eta[x]) m.atoms.emplace_back(static_cast<double>(x) / n, 1.0 / n);
  return m;
}

double DiscreteMeasure::mass() const noexcept {
  double s = 0.0;
  for (const auto& a : atoms) s += a.second;
  return s;
}

namespace {

std::pair<double, double> moment(const DensityProfile& p, int k) { return p.fourier_moment(k); }

std::pair<double, double> moment(const DiscreteMeasure& m, int k) {
  double c = 0.0, s = 0.0;
  for (const auto& [x, w] : m.atoms) {
    c += w * std::cos(2.0 * std::numbers::pi * k * x);
    s += w * std::sin(2.0 * std::numbers::pi * k * x);
  }
  return {c, s};
}

template <class A, class B>
double weak_distance_impl(const A& mu, const B& nu, int n_max) {
  if (n_max < 0) throw std::invalid_argument("weak_distance: n_max must be non-negative");
  double d = 0.0;
  for (int k = 0; k <= n_max; ++k) {
    const auto [ca, sa] = moment(mu, k);
    const auto [cb, sb] = moment(nu, k);
    const double w = std::ldexp(1.0, -k);
    d += w * std::min(std::abs(ca - cb), 1.0);
    if (k > 0) d += w * std::min(std::abs(sa - sb), 1.0);
  }
  return d;
}

}  // namespace

double weak_distance(const DensityProfile& mu, const DensityProfile& nu, int n_max) {
  return weak_distance_impl(mu, nu, n_max);
}
double weak_distance(const DiscreteMeasure& mu, const DiscreteMeasure& nu, int n_max) {
  return weak_distance_impl(mu, nu, n_max);
}
double weak_distance(const DensityProfile& mu, const DiscreteMeasure& nu, int n_max) {
  return weak_distance_impl(mu, nu, n_max);
}

PathField::PathField(std::vector<double> times, std::vector<DensityProfile> frames)
    : times_(std::move(times)), frames_(std::make_shared<const std::vector<DensityProfile>>(std::move(frames))) {
  if (times_.size() != frames_->size()) throw std::invalid_argument("PathField: times and frames differ in size");
  if (times_.empty()) throw std::invalid_argument("PathField: empty time grid");
  for (std::size_t i = 1; i < times_.size(); ++i)
    if (!(times_[i] > times_[i - 1])) throw std::invalid_argument("PathField: times must increase strictly");
}

PathField PathField::moving_frame(std::vector<double> shifts) const {
  if (shifts.size() != times_.size()) throw std::invalid_argument("PathField: one shift per frame required");
  PathField p = *this;
  p.shifts_ = std::move(shifts);
  return p;
}

double PathField::value(std::size_t m, double x) const { return (*frames_)[m](x + shift(m)); }

std::pair<std::size_t, double> PathField::locate(double t) const {
  if (times_.size() == 1 || t <= times_.front()) return {0, 0.0};
  if (t >= times_.back()) return {times_.size() - 2, 1.0};
  const auto it = std::upper_bound(times_.begin(), times_.end(), t);
  const auto i = static_cast<std::size_t>(it - times_.begin()) - 1;
  return {i, (t - times_[i]) / (times_[i + 1] - times_[i])};
}

double PathField::shift_at(double t) const {
  if (shifts_.empty()) return 0.0;
  const auto [i, w] = locate(t);
  if (times_.size() == 1) return shifts_[0];
  return (1.0 - w) * shifts_[i] + w * shifts_[i + 1];
}

double PathField::value_at(double t, double x) const {
  if (times_.size() == 1) return value(0, x);
  const auto [i, w] = locate(t);
  const double y = x + shift_at(t);
  return (1.0 - w) * (*frames_)[i](y) + w * (*frames_)[i + 1](y);
}

DensityProfile PathField::frame(std::size_t m) const { return (*frames_)[m].shifted(shift(m)); }

void PathField::set_walker(std::vector<double> lifted, std::vector<std::int64_t> plus,
                           std::vector<std::int64_t> minus) {
  if (lifted.size() != times_.size() || plus.size() != times_.size() || minus.size() != times_.size())
    throw std::invalid_argument("PathField: walker samples must match the time grid");
  for (std::size_t i = 1; i < plus.size(); ++i)
    if (plus[i] < plus[i - 1] || minus[i] < minus[i - 1])
      throw std::invalid_argument("PathField: counting measures must be non-decreasing");
  walker_ = std::move(lifted);
  plus_ = std::move(plus);
  minus_ = std::move(minus);
}

double energy_norm(const PathField& field, int points) {
  const auto& times = field.times();
  std::vector<double> slices(times.size());
  for (std::size_t m = 0; m < times.size(); ++m) {
    const auto& f = field.base_frame(m);
    std::vector<double> v;
    if (points == 0 && f.is_uniform() && f.knot_count() >= 3) {
      v = f.knot_values();
    } else {
      const int p = points > 0 ? points : 512;
      v.resize(static_cast<std::size_t>(p));
      for (int i = 0; i < p; ++i) v[static_cast<std::size_t>(i)] = f(static_cast<double>(i) / p);
    }
    const auto p = v.size();
    const double h = 1.0 / static_cast<double>(p);
    double s = 0.0;
    for (std::size_t i = 0; i < p; ++i) {
      const double d = (v[(i + 1) % p] - v[(i + p - 1) % p]) / (2.0 * h);
      s += h * d * d;
    }
    slices[m] = s;
  }
  double total = 0.0;
  for (std::size_t m = 1; m < times.size(); ++m) total += 0.5 * (times[m] - times[m - 1]) * (slices[m] + slices[m - 1]);
  return std::sqrt(total);
}

namespace {

RecordedFields assemble(std::vector<double> times, std::vector<DensityProfile> frames, std::vector<double> walker,
                        std::vector<std::int64_t> plus, std::vector<std::int64_t> minus) {
  RecordedFields r;
  r.fixed = PathField(times, std::move(frames));
  r.fixed.set_walker(walker, plus, minus);
  r.moving = r.fixed.moving_frame(walker);
  r.moving.set_walker(std::move(walker), std::move(plus), std::move(minus));
  return r;
}

}  // namespace

RecordedFields record_path_field(const Trajectory& traj, const std::vector<double>& times) {
  if (times.empty()) throw std::invalid_argument("record_path_field: empty time grid");
  for (double t : times)
    if (t < 0.0 || t > traj.horizon) throw std::invalid_argument("record_path_field: time outside [0, T]");
  const int n = traj.n;
  std::vector<DensityProfile> frames;
  std::vector<double> walker;
  std::vector<std::int64_t> plus, minus;
  Configuration eta = traj.initial;
  std::int64_t np = 0, nm = 0;
  std::size_t next = 0;
  auto take = [&](double) {
    frames.push_back(empirical_density(eta));
    walker.push_back(static_cast<double>(np - nm) / n);
    plus.push_back(np);
    minus.push_back(nm);
  };
  if (!traj.has_events) {
    for (double t : times) {
      if (t == 0.0) {
        take(t);
      } else if (t == traj.horizon) {
        eta = traj.final_state;
        np = traj.plus_count;
        nm = traj.minus_count;
        take(t);
      } else {
        throw std::invalid_argument("record_path_field: trajectory has no event log");
      }
    }
    return assemble(times, std::move(frames), std::move(walker), std::move(plus), std::move(minus));
  }
  for (const auto& e : traj.events) {
    while (next < times.size() && times[next] < e.time) take(times[next++]);
    if (next == times.size()) break;
    if (e.kind == EventKind::exchange) {
      eta.swap_sites(e.site, e.site + 1 == n ? 0 : e.site + 1);
    } else if (e.kind == EventKind::step_plus) {
      ++np;
    } else {
      ++nm;
    }
  }
  while (next < times.size()) take(times[next++]);
  return assemble(times, std::move(frames), std::move(walker), std::move(plus), std::move(minus));
}

RecordedFields record_path_field(const SimulationResult& result) {
  const int n = result.trajectory.n;
  std::vector<double> times;
  std::vector<DensityProfile> frames;
  std::vector<double> walker;
  std::vector<std::int64_t> plus, minus;
  for (const auto& s : result.snapshots) {
    times.push_back(s.time);
    frames.push_back(empirical_density(s.eta));
    walker.push_back(static_cast<double>(s.walker) / n);
    plus.push_back(s.plus_count);
    minus.push_back(s.minus_count);
  }
  if (times.empty()) throw std::invalid_argument("record_path_field: no snapshots recorded");
  return assemble(std::move(times), std::move(frames), std::move(walker), std::move(plus), std::move(minus));
}

void write_path_field_csv(std::ostream& out, const PathField& field, int n) {
  const std::size_t knots = field.size() ? field.base_frame(0).knot_count() : 0;
  out << "# n=" << n << " T=" << field.horizon() << " frames=" << field.size() << " points=" << knots << '\n';
  out << "t,x,value\n";
  out.precision(10);
  for (std::size_t m = 0; m < field.size(); ++m) {
    const auto p = field.base_frame(m).knot_count();
    for (std::size_t j = 0; j < p; ++j) {
      const double x = static_cast<double>(j) / static_cast<double>(p);
      out << field.times()[m] << ',' << x << ',' << field.value(m, x) << '\n';
    }
  }
}

void write_walker_csv(std::ostream& out, const PathField& field) {
  out << "t,x_lifted,n_plus,n_minus\n";
  out.precision(10);
  for (std::size_t m = 0; m < field.size(); ++m) {
    out << field.times()[m] << ',' << (field.has_walker() ? field.walker()[m] : 0.0) << ','
        << (field.has_walker() ? field.plus_counts()[m] : 0) << ','
        << (field.has_walker() ? field.minus_counts()[m] : 0) << '\n';
  }
}

}  // namespace rwdre
