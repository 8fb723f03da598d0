#include "rwdre/rate_breakdown.hpp"

#include <cmath>

namespace rwdre {
namespace {

nlohmann::json number(double x) {
  if (std::isfinite(x)) return x;
  return x > 0 ? "inf" : (x < 0 ? "-inf" : "nan");
}

}  // namespace

RateBreakdown rate_breakdown(const HydroSolution& sol, const DensityProfile& u0, const TiltParams& tilt,
                             const LocalRate& c, const RateBreakdownOptions& options) {
  RateBreakdown r;
  r.horizon = sol.u.horizon();
  r.times = sol.u.times();
  r.walker = sol.f;
  r.clamp_count = sol.clamp_count;
  r.max_mass_drift = sol.max_mass_drift;

  const double D = sol.diffusion;
  const auto density = density_of(sol.u);
  const auto path = WalkerPath::from_samples(r.times, r.walker);

  r.entropy_h = tilt.v0 ? entropy_h(*tilt.v0, u0) : 0.0;
  r.J = tilt.H ? J_functional(*tilt.H, sol.u, D) : 0.0;
  r.j = tilt.a ? j_functional(*tilt.a, density, path, c) : 0.0;

  IexOptions iex = options.iex;
  iex.diffusion = D;
  const auto ex = I_ex(sol.u, u0, iex);
  r.Iex = ex.value;
  r.sup_J = ex.sup_J;
  r.theta = ex.theta;
  r.optimizer = ex.optimizer.describe();

  const auto rw = I_rw(path, density, c, options.irw);
  r.Irw = rw.value;
  r.a_star = rw.a_samples;
  r.absolutely_continuous = rw.absolutely_continuous;
  r.finite1 = rw.finite1;
  r.finite2 = rw.finite2;
  r.finite3 = rw.finite3;
  r.total = r.Irw + r.Iex;
  return r;
}

RateBreakdown rate_breakdown(const DensityProfile& u0, const TiltParams& tilt, const LocalRate& c, double horizon,
                             const RateBreakdownOptions& options) {
  const auto sol = solve_perturbed(tilt.v0 ? *tilt.v0 : u0, tilt, c, horizon, options.grid);
  return rate_breakdown(sol, u0, tilt, c, options);
}

nlohmann::json to_json(const RateBreakdown& r) {
  nlohmann::json out;
  out["horizon"] = r.horizon;
  out["h"] = number(r.entropy_h);
  out["J"] = number(r.J);
  out["j"] = number(r.j);
  out["entropy_limit"] = number(r.entropy_limit());
  out["I_ex"] = number(r.Iex);
  out["sup_J"] = number(r.sup_J);
  out["I_rw"] = number(r.Irw);
  out["total"] = number(r.total);
  out["flags"] = {{"absolutely_continuous", r.absolutely_continuous},
                  {"finite1", r.finite1},
                  {"finite2", r.finite2},
                  {"finite3", r.finite3}};
  nlohmann::json a = nlohmann::json::array();
  for (double x : r.a_star) a.push_back(number(x));
  out["path"] = {{"t", r.times}, {"f", r.walker}, {"a_star", a}};
  out["optimizer"] = {{"theta", r.theta}, {"H", r.optimizer}};
  out["hydro"] = {{"clamp_count", r.clamp_count}, {"max_mass_drift", r.max_mass_drift}};
  return out;
}

}  // namespace rwdre
