#include "rwdre/hydro.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>

namespace rwdre {

SpaceTimeGrid SpaceTimeGrid::make(int points, double horizon, int frames, double courant, double diffusion) {
  if (points < 3 || !(horizon > 0.0) || frames < 1 || !(courant > 0.0) || !(diffusion > 0.0))
    throw std::invalid_argument("SpaceTimeGrid::make: invalid arguments");
  SpaceTimeGrid g;
  g.points = points;
  g.diffusion = diffusion;
  const double dt0 = courant / (diffusion * points * static_cast<double>(points));
  const auto steps = static_cast<long>(std::ceil(horizon / dt0));
  g.record_every = static_cast<int>(std::max<long>(1, steps / frames));
  const long total = ((steps + g.record_every - 1) / g.record_every) * g.record_every;
  g.dt = horizon / static_cast<double>(total);
  return g;
}

namespace {

// (1 + 2r) on the diagonal, -r off the diagonal and in the corners.
// Sherman-Morrison on top of a precomputed Thomas factorisation.
class CyclicSolver {
 public:
  CyclicSolver(int m, double r) : m_(m), r_(r) {
    const double diag = 1.0 + 2.0 * r;
    gamma_ = -diag;
    // Modified tridiagonal: first diagonal diag - gamma, last diag - r*r/gamma.
    b_.assign(static_cast<std::size_t>(m), diag);
    b_.front() = diag - gamma_;
    b_.back() = diag - r * r / gamma_;  // corners alpha = beta = -r
    cprime_.resize(static_cast<std::size_t>(m));
    denom_.resize(static_cast<std::size_t>(m));
    double c_prev = 0.0;
    for (int i = 0; i < m; ++i) {
      const double a = i == 0 ? 0.0 : -r;
      const double d = b_[static_cast<std::size_t>(i)] - a * c_prev;
      denom_[static_cast<std::size_t>(i)] = d;
      c_prev = i + 1 < m ? -r / d : 0.0;
      cprime_[static_cast<std::size_t>(i)] = c_prev;
    }
    std::vector<double> u(static_cast<std::size_t>(m), 0.0);
    u.front() = gamma_;
    u.back() = -r;
    z_ = thomas(u);
  }

  void solve(std::vector<double>& rhs) const {
    const auto y = thomas(rhs);
    const double fact = (y.front() + (-r_) * y.back() / gamma_) / (1.0 + z_.front() + (-r_) * z_.back() / gamma_);
    const double target = std::accumulate(rhs.begin(), rhs.end(), 0.0);
    for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] = y[i] - fact * z_[i];
    // The operator maps constants to themselves, so the lost sum is restored
    // exactly by a uniform shift.
    const double shift = (target - std::accumulate(rhs.begin(), rhs.end(), 0.0)) / static_cast<double>(m_);
    for (auto& v : rhs) v += shift;
  }

 private:
  std::vector<double> thomas(const std::vector<double>& d) const {
    std::vector<double> x(d.size());
    double prev = 0.0;
    for (int i = 0; i < m_; ++i) {
      const double a = i == 0 ? 0.0 : -r_;
      prev = (d[static_cast<std::size_t>(i)] - a * prev) / denom_[static_cast<std::size_t>(i)];
      x[static_cast<std::size_t>(i)] = prev;
    }
    for (int i = m_ - 2; i >= 0; --i)
      x[static_cast<std::size_t>(i)] -= cprime_[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(i) + 1];
    return x;
  }

  int m_;
  double r_;
  double gamma_;
  std::vector<double> b_, cprime_, denom_, z_;
};

double periodic_interp(const std::vector<double>& u, double x) {
  const auto m = static_cast<double>(u.size());
  double s = (x - std::floor(x)) * m;
  auto i = static_cast<std::size_t>(s);
  if (i >= u.size()) i = 0, s = 0.0;
  const double w = s - static_cast<double>(i);
  const std::size_t j = i + 1 == u.size() ? 0 : i + 1;
  return (1.0 - w) * u[i] + w * u[j];
}

double nodal_mass(const std::vector<double>& u) {
  return std::accumulate(u.begin(), u.end(), 0.0) / static_cast<double>(u.size());
}

struct Evolution {
  std::vector<double> times;
  std::vector<DensityProfile> frames;
  std::vector<double> f;
  std::vector<double> mass;
  long clamps = 0;
  double max_mass_drift = 0.0;
};

Evolution evolve(const DensityProfile& u0, const TestFunctionH* H, const TimeFunction* a, const LocalRate* c,
                 double horizon, const SpaceTimeGrid& grid) {
  if (!(horizon > 0.0)) throw std::invalid_argument("hydro: horizon must be positive");
  if (grid.points < 3) throw std::invalid_argument("hydro: need at least 3 grid points");
  if (!(grid.dt > 0.0) || grid.record_every < 1) throw std::invalid_argument("hydro: invalid time step");
  if (!(grid.diffusion > 0.0)) throw std::invalid_argument("hydro: diffusion must be positive");
  const int m = grid.points;
  const double h = 1.0 / m;
  const double D = grid.diffusion;
  const auto steps = static_cast<long>(std::ceil(horizon / grid.dt - 1e-9));
  const double dt = horizon / static_cast<double>(steps);
  const double r = D * dt / (h * h);
  if (grid.explicit_scheme && r > 0.5) {
    std::ostringstream msg;
    msg << "explicit scheme unstable: D dt / h^2 = " << r << " > 1/2";
    throw StabilityError(msg.str());
  }
  const bool drift = H && !H->is_zero();
  if (drift) {
    const double cfl = 2.0 * D * H->sup_abs_dx() * dt / h;
    if (cfl > 1.0) {
      std::ostringstream msg;
      msg << "drift term unstable: 2 D |H_x| dt / h = " << cfl << " > 1";
      throw StabilityError(msg.str());
    }
  }

  std::vector<double> u(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) u[static_cast<std::size_t>(i)] = u0(i * h);
  std::vector<double> next(u.size()), flux(u.size());
  std::optional<CyclicSolver> solver;
  if (!grid.explicit_scheme) solver.emplace(m, r);

  Evolution ev;
  double f = 0.0;
  const double mass0 = nodal_mass(u);
  auto store = [&](double t) {
    ev.times.push_back(t);
    ev.frames.push_back(DensityProfile::uniform(u, false));
    ev.f.push_back(f);
    const double mass = nodal_mass(u);
    ev.mass.push_back(mass);
    ev.max_mass_drift = std::max(ev.max_mass_drift, std::abs(mass - mass0));
  };
  auto velocity = [&](double t, double rho) {
    rho = std::clamp(rho, 0.0, 1.0);
    const double vp = c->plus().mean(rho), vm = c->minus().mean(rho);
    const double at = a ? (*a)(t) : 0.0;
    return std::exp(at) * vp - std::exp(-at) * vm;
  };
  store(0.0);
  for (long k = 0; k < steps; ++k) {
    const double t = k * dt;
    // Conservative drift flux 2 D chi(u) H_x at faces i + 1/2.
    if (drift) {
      for (int i = 0; i < m; ++i) {
        const auto ii = static_cast<std::size_t>(i);
        const std::size_t jj = i + 1 == m ? 0 : ii + 1;
        const double chi = 0.5 * (u[ii] * (1.0 - u[ii]) + u[jj] * (1.0 - u[jj]));
        flux[ii] = 2.0 * D * chi * H->dx(t, (i + 0.5) * h);
      }
    }
    for (int i = 0; i < m; ++i) {
      const auto ii = static_cast<std::size_t>(i);
      const std::size_t left = i == 0 ? static_cast<std::size_t>(m - 1) : ii - 1;
      const std::size_t right = i + 1 == m ? 0 : ii + 1;
      double val = u[ii];
      if (drift) val -= dt * (flux[ii] - flux[left]) / h;
      if (grid.explicit_scheme) val += r * (u[right] - 2.0 * u[ii] + u[left]);
      next[ii] = val;
    }
    if (solver) solver->solve(next);
    for (auto& v : next) {
      if (v < 0.0 || v > 1.0) {
        // Round-off excursions are clipped silently; real ones are counted.
        if (v < -1e-12 || v > 1.0 + 1e-12) ++ev.clamps;
        v = std::clamp(v, 0.0, 1.0);
      }
    }
    if (c) {
      // RK4 with u linear in time between the two levels.
      auto rho = [&](double w, double y) { return (1.0 - w) * periodic_interp(u, y) + w * periodic_interp(next, y); };
      const double k1 = velocity(t, rho(0.0, f));
      const double k2 = velocity(t + 0.5 * dt, rho(0.5, f + 0.5 * dt * k1));
      const double k3 = velocity(t + 0.5 * dt, rho(0.5, f + 0.5 * dt * k2));
      const double k4 = velocity(t + dt, rho(1.0, f + dt * k3));
      f += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    u.swap(next);
    if ((k + 1) % grid.record_every == 0 || k + 1 == steps) store(k + 1 == steps ? horizon : (k + 1) * dt);
  }
  return ev;
}

}  // namespace

double HydroSolution::walker_at(double t) const {
  const auto& times = u.times();
  if (times.size() == 1 || t <= times.front()) return f.front();
  if (t >= times.back()) return f.back();
  const auto it = std::upper_bound(times.begin(), times.end(), t);
  const auto i = static_cast<std::size_t>(it - times.begin()) - 1;
  const double w = (t - times[i]) / (times[i + 1] - times[i]);
  return (1.0 - w) * f[i] + w * f[i + 1];
}

PathField solve_heat(const DensityProfile& u0, double horizon, const SpaceTimeGrid& grid) {
  auto ev = evolve(u0, nullptr, nullptr, nullptr, horizon, grid);
  return PathField(std::move(ev.times), std::move(ev.frames));
}

HydroSolution solve_perturbed(const DensityProfile& v0, const TiltParams& tilt, const LocalRate& c, double horizon,
                              const SpaceTimeGrid& grid) {
  const TestFunctionH* H = tilt.has_environment_tilt() ? &*tilt.H : nullptr;
  const TimeFunction* a = tilt.has_walker_tilt() ? &*tilt.a : nullptr;
  auto ev = evolve(v0, H, a, &c, horizon, grid);
  HydroSolution sol;
  sol.u = PathField(ev.times, std::move(ev.frames));
  sol.u_hat = sol.u.moving_frame(ev.f);
  sol.f = std::move(ev.f);
  sol.mass = std::move(ev.mass);
  sol.diffusion = grid.diffusion;
  sol.clamp_count = ev.clamps;
  sol.max_mass_drift = ev.max_mass_drift;
  return sol;
}

double evaluate_frame(const HydroSolution& sol, double t, double x) { return sol.u_hat.value_at(t, x); }

}  // namespace rwdre
