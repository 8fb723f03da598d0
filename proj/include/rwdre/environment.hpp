#pragma once

#include <cstdint>
#include <vector>

#include "rwdre/dynamics.hpp"
#include "rwdre/lattice.hpp"
#include "rwdre/local_function.hpp"
#include "rwdre/rng.hpp"

namespace rwdre {

enum class EnvironmentEventKind : std::uint8_t { exchange = 0, shift_plus = 1, shift_minus = 2 };

/// Event of the environment seen from the walker. shift_plus replaces xi by
/// tau_{1/n} xi (what a right step of the walker looks like); exchanges refer
/// to the bond (site, site + 1) in walker coordinates.
struct EnvironmentEvent {
  double time = 0.0;
  EnvironmentEventKind kind = EnvironmentEventKind::exchange;
  std::int32_t site = 0;
};

struct EnvironmentPath {
  int n = 0;
  double horizon = 0.0;
  Configuration initial;
  std::vector<EnvironmentEvent> events;
};

/// Observable xi-path of a trajectory. When the configuration holds a single
/// particle or a single hole, a move of that particle is indistinguishable
/// from a shift and is labelled as one.
EnvironmentPath observe_environment(const Trajectory& traj);

struct WalkerCounts {
  std::vector<double> plus_times;
  std::vector<double> minus_times;

  std::int64_t plus() const noexcept { return static_cast<std::int64_t>(plus_times.size()); }
  std::int64_t minus() const noexcept { return static_cast<std::int64_t>(minus_times.size()); }
  std::int64_t plus_at(double t) const;
  std::int64_t minus_at(double t) const;
};

/// Counting processes N+ and N- reconstructed from the xi-path alone.
WalkerCounts recover_walker_counts(const EnvironmentPath& path, const LocalRate& c, Stream& rng,
                                   double diffusion = 1.0);

/// integral_0^t { f(xi_s) - E_{rho_s}[f] } ds with rho_s the block average of
/// the moving-frame empirical density over (0, eps]. Needs the event log.
double replacement_error(const Trajectory& traj, const LocalFunction& f, double eps, double t);

}  // namespace rwdre
