#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "rwdre/hydro.hpp"
#include "rwdre/ldp.hpp"
#include "rwdre/tilt.hpp"

namespace rwdre {

struct RateBreakdownOptions {
  SpaceTimeGrid grid;
  IexOptions iex;
  IrwOptions irw;
};

/// Rate-function terms along the hydrodynamic path of a tilt.
struct RateBreakdown {
  double horizon = 0.0;
  double entropy_h = 0.0;  // h(v0 | u0)
  double J = 0.0;          // J(H; u)
  double j = 0.0;          // j(a; u, f)
  double Iex = 0.0;        // h + sup_H J over the basis
  double sup_J = 0.0;
  double Irw = 0.0;
  double total = 0.0;      // Irw + Iex
  bool absolutely_continuous = true;
  bool finite1 = true, finite2 = true, finite3 = true;
  std::vector<double> times;
  std::vector<double> walker;
  std::vector<double> a_star;
  std::vector<double> theta;
  std::string optimizer;
  long clamp_count = 0;
  double max_mass_drift = 0.0;

  /// Limit of the per-site relative entropy: h + J + j.
  double entropy_limit() const noexcept { return entropy_h + J + j; }
};

RateBreakdown rate_breakdown(const DensityProfile& u0, const TiltParams& tilt, const LocalRate& c, double horizon,
                             const RateBreakdownOptions& options = {});
RateBreakdown rate_breakdown(const HydroSolution& sol, const DensityProfile& u0, const TiltParams& tilt,
                             const LocalRate& c, const RateBreakdownOptions& options = {});

nlohmann::json to_json(const RateBreakdown& r);

}  // namespace rwdre
