#include "rwdre/environment.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rwdre {
namespace {

// Integral over [a, b] of the tent (1 - n|y - c|)^+.
double tent_integral(double c, int n, double a, double b) {
  const double h = 1.0 / n;
  auto piece = [&](double lo, double hi, bool rising) {
    lo = std::max(lo, a);
    hi = std::min(hi, b);
    if (hi <= lo) return 0.0;
    auto f = [&](double y) { return rising ? 1.0 - n * (c - y) : 1.0 - n * (y - c); };
    return 0.5 * (hi - lo) * (f(lo) + f(hi));
  };
  return piece(c - h, c, true) + piece(c, c + h, false);
}

}  // namespace

EnvironmentPath observe_environment(const Trajectory& traj) {
  if (!traj.has_events) throw std::invalid_argument("observe_environment: trajectory has no event log");
  const int n = traj.n;
  EnvironmentPath path;
  path.n = n;
  path.horizon = traj.horizon;
  path.initial = traj.initial;
  path.events.reserve(traj.events.size());
  const int k = traj.initial.particle_count();
  const bool single = k == 1 || k == n - 1;
  const std::uint8_t minority = k == 1 ? 1 : 0;
  Configuration eta = traj.initial;
  std::int64_t x = 0;
  auto wrap = [n](std::int64_t i) {
    const std::int64_t r = i % n;
    return static_cast<int>(r < 0 ? r + n : r);
  };
  for (const auto& e : traj.events) {
    switch (e.kind) {
      case EventKind::step_plus:
        path.events.push_back({e.time, EnvironmentEventKind::shift_plus, 0});
        ++x;
        break;
      case EventKind::step_minus:
        path.events.push_back({e.time, EnvironmentEventKind::shift_minus, 0});
        --x;
        break;
      case EventKind::exchange: {
        const int y = e.site;
        const int z = y + 1 == n ? 0 : y + 1;
        const int q = wrap(y - x);
        if (single) {
          // The minority value moves from one end of the bond to the other.
          const bool moves_right = eta[y] == minority;
          path.events.push_back(
              {e.time, moves_right ? EnvironmentEventKind::shift_minus : EnvironmentEventKind::shift_plus, q});
        } else {
          path.events.push_back({e.time, EnvironmentEventKind::exchange, q});
        }
        eta.swap_sites(y, z);
        break;
      }
    }
  }
  return path;
}

std::int64_t WalkerCounts::plus_at(double t) const {
  return std::upper_bound(plus_times.begin(), plus_times.end(), t) - plus_times.begin();
}

std::int64_t WalkerCounts::minus_at(double t) const {
  return std::upper_bound(minus_times.begin(), minus_times.end(), t) - minus_times.begin();
}

WalkerCounts recover_walker_counts(const EnvironmentPath& path, const LocalRate& c, Stream& rng,
                                   double diffusion) {
  const int n = path.n;
  WalkerCounts out;
  Configuration xi = path.initial;
  const int k = xi.particle_count();
  if (k == 0 || k == n) {
    if (!path.events.empty())
      for (const auto& e : path.events)
        if (e.kind == EnvironmentEventKind::exchange)
          throw std::invalid_argument("recover_walker_counts: exchange in an empty or full configuration");
    const auto r = c.evaluate(xi, 0);
    for (int z : {1, -1}) {
      const double rate = n * (z > 0 ? r.plus : r.minus);
      auto& times = z > 0 ? out.plus_times : out.minus_times;
      if (rate <= 0.0) continue;
      for (double t = rng.exponential(rate); t <= path.horizon; t += rng.exponential(rate)) times.push_back(t);
    }
    return out;
  }
  const bool single = k == 1 || k == n - 1;
  const double particle_rate = diffusion * n;  // per-move rate divided by n
  for (const auto& e : path.events) {
    if (e.kind == EnvironmentEventKind::exchange) {
      if (single) throw std::invalid_argument("recover_walker_counts: unlabelled move of a single particle");
      xi.swap_sites(e.site, e.site + 1 == n ? 0 : e.site + 1);
      continue;
    }
    const int z = e.kind == EnvironmentEventKind::shift_plus ? 1 : -1;
    bool keep = true;
    if (single) {
      const auto r = c.evaluate(xi, 0);
      const double walk = z > 0 ? r.plus : r.minus;
      const double discard = particle_rate / (particle_rate + walk);
      keep = !rng.bernoulli(discard);
    }
    if (keep) (z > 0 ? out.plus_times : out.minus_times).push_back(e.time);
    xi = xi.shifted(z);
  }
  return out;
}

double replacement_error(const Trajectory& traj, const LocalFunction& f, double eps, double t) {
  if (!(eps > 0.0 && eps < 0.5)) throw std::invalid_argument("replacement_error: eps must lie in (0, 1/2)");
  if (t < 0.0 || t > traj.horizon) throw std::invalid_argument("replacement_error: t outside [0, T]");
  const int n = traj.n;
  // Weights of xi(z) in the block average over (0, eps].
  std::vector<std::pair<int, double>> weights;
  for (int z = 0; z <= static_cast<int>(std::ceil(eps * n)) + 1 && z < n; ++z) {
    const double w = tent_integral(static_cast<double>(z) / n, n, 0.0, eps);
    if (w > 0.0) weights.emplace_back(z, w / eps);
  }
  Configuration eta = traj.initial;
  std::int64_t x = 0;
  auto wrap = [n](std::int64_t i) {
    const std::int64_t r = i % n;
    return static_cast<int>(r < 0 ? r + n : r);
  };
  auto integrand = [&]() {
    const int site = wrap(x);
    double block = 0.0;
    for (const auto& [z, w] : weights) block += w * eta[wrap(site + z)];
    block = std::clamp(block, 0.0, 1.0);
    return f(eta, site) - f.mean(block);
  };
  if (t > 0.0 && !traj.has_events) throw std::invalid_argument("replacement_error: trajectory has no event log");
  double total = 0.0, last = 0.0;
  double current = integrand();
  for (const auto& e : traj.events) {
    if (e.time > t) break;
    total += (e.time - last) * current;
    last = e.time;
    if (e.kind == EventKind::exchange) {
      eta.swap_sites(e.site, e.site + 1 == n ? 0 : e.site + 1);
    } else {
      x += e.kind == EventKind::step_plus ? 1 : -1;
    }
    current = integrand();
  }
  total += (t - last) * current;
  return total;
}

}  // namespace rwdre
