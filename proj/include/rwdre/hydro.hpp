#pragma once

#include <vector>

#include "rwdre/fields.hpp"
#include "rwdre/local_function.hpp"
#include "rwdre/profile.hpp"
#include "rwdre/tilt.hpp"

namespace rwdre {

struct SpaceTimeGrid {
  int points = 256;        // periodic nodes x_i = i / points
  double dt = 2.5e-5;
  int record_every = 400;  // steps between stored frames (the final time is always stored)
  bool explicit_scheme = false;
  double diffusion = 1.0;

  /// Grid with dt chosen so that diffusion * dt * points^2 = courant and
  /// roughly `frames` stored frames over [0, horizon].
  static SpaceTimeGrid make(int points, double horizon, int frames = 100, double courant = 1.6,
                            double diffusion = 1.0);
};

class StabilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct HydroSolution {
  PathField u;                // density in the fixed frame
  PathField u_hat;            // u(t, x + f(t))
  std::vector<double> f;      // lifted walker position at the stored times
  std::vector<double> mass;   // mass of u at the stored times
  double diffusion = 1.0;
  long clamp_count = 0;       // nodal values clipped back into [0, 1]
  double max_mass_drift = 0.0;

  double walker_at(double t) const;
  /// u(t, x) at an absolute (lifted) position x.
  double density_at(double t, double x) const { return u.value_at(t, x); }
};

/// Periodic heat equation d_t u = D u_xx.
PathField solve_heat(const DensityProfile& u0, double horizon, const SpaceTimeGrid& grid);

/// d_t u = D (u_xx - 2 d_x(u(1-u) d_x H)) from v0, and the walker ODE
/// f' = e^{a} v+(u(t,f)) - e^{-a} v-(u(t,f)), f(0) = 0.
HydroSolution solve_perturbed(const DensityProfile& v0, const TiltParams& tilt, const LocalRate& c,
                              double horizon, const SpaceTimeGrid& grid);

/// Moving-frame density u-hat(t, x) = u(t, x + f(t)).
double evaluate_frame(const HydroSolution& sol, double t, double x);

}  // namespace rwdre
