#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "rwdre/lattice.hpp"
#include "rwdre/local_function.hpp"
#include "rwdre/rng.hpp"
#include "rwdre/tilt.hpp"

namespace rwdre {

/// Which law the path is drawn from. Accumulators always refer to the tilt
/// passed to simulate(), so a reference-law run with a tilt measures the
/// martingale of that tilt under the original dynamics.
enum class Law { reference, tilted };

struct SimulationOptions {
  double horizon = 1.0;
  std::vector<double> record_times;  // increasing, inside [0, horizon]
  double diffusion = 1.0;            // exchange rate per bond is diffusion * n^2
  bool record_events = false;
  bool accumulate = false;
  Law law = Law::reference;
  double quadrature_tolerance = 1e-8;  // per unit time
  bool force_exact = false;            // disable the uniformised fast path
};

enum class EventKind : std::uint8_t { exchange = 0, step_plus = 1, step_minus = 2 };

/// Exchange events refer to the bond (site, site + 1); only exchanges that
/// change the configuration are logged. Walker steps carry the site the
/// walker left.
struct Event {
  double time = 0.0;
  EventKind kind = EventKind::exchange;
  std::int32_t site = 0;
};

struct Snapshot {
  double time = 0.0;
  Configuration eta;
  std::int64_t walker = 0;  // lifted integer position N+ - N-
  std::int64_t plus_count = 0;
  std::int64_t minus_count = 0;
};

/// Pathwise log-densities, each divided by n.
struct TiltAccumulators {
  double log_init = 0.0;
  double log_Ma = 0.0;
  double log_MH = 0.0;
  // Predictable compensators of the three terms under the tilted law; their
  // sum has the same mean as log_init + log_Ma + log_MH under that law.
  double entropy_init = 0.0;
  double entropy_walker = 0.0;
  double entropy_environment = 0.0;
  double quadrature_error = 0.0;

  double log_martingale() const noexcept { return log_init + log_Ma + log_MH; }
  double entropy() const noexcept { return entropy_init + entropy_walker + entropy_environment; }
};

struct InitialState {
  Configuration eta;
  double log_density = 0.0;       // log(d tilted / d reference)(eta)
  double entropy_per_site = 0.0;  // exact mean of log_density / n under the tilted law
};

class Trajectory {
 public:
  int n = 0;
  double horizon = 0.0;
  Configuration initial;
  Configuration final_state;
  std::int64_t plus_count = 0;
  std::int64_t minus_count = 0;
  std::uint64_t exchange_count = 0;  // state-changing exchanges
  bool has_events = false;
  std::vector<Event> events;

  std::int64_t walker() const noexcept { return plus_count - minus_count; }
  double walker_position() const noexcept { return static_cast<double>(walker()) / n; }
  int walker_site() const noexcept;

  /// Replays the event log; requires has_events unless t is 0 or the horizon.
  Configuration configuration_at(double t) const;
  std::int64_t walker_at(double t) const;
};

struct SimulationResult {
  Trajectory trajectory;
  TiltAccumulators accumulators;
  std::vector<Snapshot> snapshots;
  bool exact_engine = false;
};

class RateBoundViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class QuadratureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

SimulationResult simulate(const TorusLattice& lattice, const LocalRate& c, const InitialState& init,
                          const TiltParams* tilt, const SimulationOptions& options, Stream& rng);

SimulationResult simulate(const TorusLattice& lattice, const LocalRate& c, const Configuration& init,
                          const TiltParams* tilt, const SimulationOptions& options, Stream& rng);

/// xi_t = tau_{x_t} eta_t.
Configuration environment_view(const Trajectory& traj, double t);

/// Uniform grid 0, T/m, ..., T.
std::vector<double> uniform_times(double horizon, int intervals);

}  // namespace rwdre
