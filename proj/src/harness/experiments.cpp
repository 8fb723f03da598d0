#include "rwdre/harness/experiments.hpp"

#include <cmath>
#include <optional>
#include <sstream>

#include "rwdre/environment.hpp"
#include "rwdre/fields.hpp"
#include "rwdre/measures.hpp"

namespace rwdre {
namespace {

struct Setup {
  int n;
  TorusLattice lattice;
  std::optional<TiltedInitialLaw> law;
};

Setup setup(const ExperimentConfig& cfg, int n, bool tilted_initial) {
  Setup s{n, TorusLattice(n), std::nullopt};
  if (tilted_initial && cfg.tilt.params.v0) s.law = tilted_initial_law(s.lattice, cfg.model.u0, *cfg.tilt.params.v0);
  return s;
}

InitialState draw_initial(const ExperimentConfig& cfg, const Setup& s, Stream& rng) {
  InitialState init;
  if (s.law) {
    auto sample = sample_tilted_initial(*s.law, rng);
    init.eta = std::move(sample.eta);
    init.log_density = sample.log_density;
    init.entropy_per_site = s.law->entropy_per_site;
  } else {
    init.eta = sample_product_profile(s.lattice, cfg.model.u0, rng);
  }
  return init;
}

SimulationOptions base_options(const ExperimentConfig& cfg) {
  SimulationOptions o;
  o.horizon = cfg.model.horizon;
  o.record_times = uniform_times(cfg.model.horizon, cfg.run.record_points);
  o.diffusion = cfg.model.diffusion;
  return o;
}

ExperimentReport start(const ExperimentConfig& cfg, std::string kind) {
  ExperimentReport r;
  r.kind = std::move(kind);
  r.fingerprint.seed = cfg.run.seed;
  r.fingerprint.config_hash = cfg.hash();
  return r;
}

std::string fmt(double x) {
  std::ostringstream s;
  s.precision(6);
  s << x;
  return s.str();
}

void check_decreasing(ExperimentReport& report, const std::string& name, bool use_value = false) {
  if (report.rows.size() < 2) return;
  bool ok = true;
  std::string detail;
  double prev = 0.0;
  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    const auto& row = report.rows[i];
    const double v = use_value ? row.value(name) : row.estimate(name).mean;
    if (i > 0 && !(v < prev)) ok = false;
    detail += (i ? ", " : "") + std::string("n=") + std::to_string(row.n) + ": " + fmt(v);
    prev = v;
  }
  report.check(name + " strictly decreasing in n", ok, detail);
}

/// Hydrodynamic profile at each recording time.
std::vector<DensityProfile> frames_at(const PathField& field, const std::vector<double>& times, int points) {
  std::vector<DensityProfile> out;
  out.reserve(times.size());
  for (double t : times)
    out.push_back(DensityProfile::from_function([&](double x) { return field.value_at(t, x); }, points));
  return out;
}

struct PathDistances {
  double l1_T = 0.0;
  double moving_l1_T = 0.0;
  double walker_sup = 0.0;
};

PathDistances distances(const SimulationResult& res, const HydroSolution& sol, double eps) {
  PathDistances d;
  const auto fields = record_path_field(res);
  const std::size_t last = fields.fixed.size() - 1;
  const std::size_t hlast = sol.u.size() - 1;
  d.l1_T = block_l1_distance(fields.fixed.frame(last), sol.u.frame(hlast), eps);
  d.moving_l1_T = block_l1_distance(fields.moving.frame(last), sol.u_hat.frame(hlast), eps);
  const int n = res.trajectory.n;
  for (const auto& s : res.snapshots)
    d.walker_sup = std::max(d.walker_sup, std::abs(static_cast<double>(s.walker) / n - sol.walker_at(s.time)));
  return d;
}

ExperimentReport lln_like(const ExperimentConfig& cfg, bool tilted) {
  auto report = start(cfg, tilted ? "perturbed-lln" : "lln");
  const auto& c = cfg.model.rates;
  const double T = cfg.model.horizon;
  const double eps = cfg.tol.block_eps;
  const auto grid = hydro_grid(cfg);
  const TiltParams null_tilt;
  const TiltParams& tilt = tilted ? cfg.tilt.params : null_tilt;
  const DensityProfile& start_profile = tilted && tilt.v0 ? *tilt.v0 : cfg.model.u0;
  const auto sol = solve_perturbed(start_profile, tilt, c, T, grid);
  report.notes.push_back("density distances use eps-block averages with eps = " + fmt(eps));
  report.notes.push_back("walker distance is the maximum over the recording grid");

  for (int n : cfg.model.sizes) {
    const auto s = setup(cfg, n, tilted);
    auto options = base_options(cfg);
    if (tilted) options.law = Law::tilted;
    const auto purpose = tilted ? Purpose::perturbed : Purpose::lln;
    const auto results = run_replicas<PathDistances>(cfg.run.replicas, cfg.run.threads, [&](int r) {
      auto rng = replica_stream(cfg.run.seed, purpose, n, r);
      const auto init = draw_initial(cfg, s, rng);
      const auto res = simulate(s.lattice, c, init, tilted ? &tilt : nullptr, options, rng);
      return distances(res, sol, eps);
    });
    std::vector<double> l1, moving, walker;
    for (const auto& d : results) {
      l1.push_back(d.l1_T);
      moving.push_back(d.moving_l1_T);
      walker.push_back(d.walker_sup);
    }
    Row row;
    row.n = n;
    row.add("l1_T", Estimate::of(l1));
    row.add("moving_l1_T", Estimate::of(moving));
    row.add("walker_sup", Estimate::of(walker));
    row.add("hydro_f_T", sol.f.back());
    row.add("hydro_mass_drift", sol.max_mass_drift);
    report.rows.push_back(std::move(row));
  }
  check_decreasing(report, "l1_T");
  check_decreasing(report, "moving_l1_T");
  check_decreasing(report, "walker_sup");
  const auto& last = report.rows.back();
  report.check("l1_T at n=" + std::to_string(last.n) + " <= " + fmt(cfg.tol.l1_max),
               last.estimate("l1_T").mean <= cfg.tol.l1_max, "mean " + fmt(last.estimate("l1_T").mean));
  return report;
}

}  // namespace

Stream replica_stream(std::uint64_t seed, Purpose purpose, int n, int replica) {
  return Stream(seed, stream_id(static_cast<std::uint64_t>(purpose), static_cast<std::uint64_t>(n),
                                static_cast<std::uint64_t>(replica)));
}

SpaceTimeGrid hydro_grid(const ExperimentConfig& cfg) {
  return SpaceTimeGrid::make(cfg.run.hydro_points, cfg.model.horizon, cfg.run.record_points, 1.6,
                             cfg.model.diffusion);
}

ExperimentReport run_velocity_experiment(const ExperimentConfig& cfg) {
  auto report = start(cfg, "velocity");
  const auto& c = cfg.model.rates;
  const double T = cfg.model.horizon;
  const double rho = cfg.model.u0.mass();
  const double v = mean_field_velocity(c, rho).drift;
  const bool equilibrium = cfg.model.u0.min_value() == cfg.model.u0.max_value();
  for (int n : cfg.model.sizes) {
    const auto s = setup(cfg, n, false);
    SimulationOptions options;
    options.horizon = T;
    options.diffusion = cfg.model.diffusion;
    const auto samples = run_replicas<double>(cfg.run.replicas, cfg.run.threads, [&](int r) {
      auto rng = replica_stream(cfg.run.seed, Purpose::velocity, n, r);
      const auto init = draw_initial(cfg, s, rng);
      return simulate(s.lattice, c, init, nullptr, options, rng).trajectory.walker_position() / T;
    });
    Row row;
    row.n = n;
    row.add("velocity", Estimate::of(samples));
    row.add("mean_field_velocity", v);
    report.rows.push_back(row);
    if (equilibrium)
      report.check_close("x_T/T matches v(rho) at n=" + std::to_string(n), row.estimate("velocity"), v, cfg.tol.z,
                         cfg.tol.atol);
  }
  if (!equilibrium) report.notes.push_back("u0 is not constant; velocity reported without a check");
  return report;
}

ExperimentReport run_lln_experiment(const ExperimentConfig& cfg) {
  if (!cfg.tilt.params.is_null())
    throw ConfigError("lln experiment runs under the reference law; remove the [tilt] block");
  return lln_like(cfg, false);
}

ExperimentReport run_perturbed_lln_experiment(const ExperimentConfig& cfg) { return lln_like(cfg, true); }

ExperimentReport run_entropy_experiment(const ExperimentConfig& cfg) {
  auto report = start(cfg, "entropy");
  const auto& c = cfg.model.rates;
  const auto& tilt = cfg.tilt.params;
  RateBreakdownOptions rb_options;
  rb_options.grid = hydro_grid(cfg);
  const auto rb = rate_breakdown(cfg.model.u0, tilt, c, cfg.model.horizon, rb_options);
  const double limit = rb.entropy_limit();
  report.extra["rate_breakdown"] = to_json(rb);
  report.notes.push_back("entropy estimated by the compensator of the log-likelihood ratio; the raw "
                         "log-likelihood average is reported alongside");

  for (int n : cfg.model.sizes) {
    const auto s = setup(cfg, n, true);
    SimulationOptions options;
    options.horizon = cfg.model.horizon;
    options.diffusion = cfg.model.diffusion;
    options.accumulate = true;
    options.law = Law::tilted;
    const auto acc = run_replicas<TiltAccumulators>(cfg.run.replicas, cfg.run.threads, [&](int r) {
      auto rng = replica_stream(cfg.run.seed, Purpose::entropy, n, r);
      const auto init = draw_initial(cfg, s, rng);
      return simulate(s.lattice, c, init, &tilt, options, rng).accumulators;
    });
    std::vector<double> raw, compensated;
    for (const auto& a : acc) {
      raw.push_back(a.log_martingale());
      compensated.push_back(a.entropy());
    }
    Row row;
    row.n = n;
    row.add("entropy", Estimate::of(compensated));
    row.add("log_likelihood", Estimate::of(raw));
    row.add("limit", limit);
    row.add("h", rb.entropy_h);
    row.add("J", rb.J);
    row.add("j", rb.j);
    row.add("gap", std::abs(row.estimate("entropy").mean - limit));
    const auto& e1 = row.estimate("entropy");
    const auto& e2 = row.estimate("log_likelihood");
    const double combined = std::hypot(e1.std_error, e2.std_error);
    report.check("entropy estimators agree at n=" + std::to_string(n),
                 std::abs(e1.mean - e2.mean) <= std::max(cfg.tol.atol, cfg.tol.z * combined) + 1e-12,
                 fmt(e1.mean) + " vs " + fmt(e2.mean) + " (combined stderr " + fmt(combined) + ")");
    report.rows.push_back(std::move(row));
  }
  check_decreasing(report, "gap", true);
  const auto& last = report.rows.back();
  report.check("gap at n=" + std::to_string(last.n) + " <= " + fmt(cfg.tol.entropy_gap),
               last.value("gap") <= cfg.tol.entropy_gap,
               "gap " + fmt(last.value("gap")) + " (stderr " + fmt(last.estimate("entropy").std_error) + ")");
  return report;
}

ExperimentReport run_importance_sampling(const ExperimentConfig& cfg) {
  auto report = start(cfg, "importance");
  const auto& c = cfg.model.rates;
  const auto& tilt = cfg.tilt.params;
  const double T = cfg.model.horizon;
  const double eps = cfg.tol.block_eps;
  RateBreakdownOptions rb_options;
  rb_options.grid = hydro_grid(cfg);
  const auto sol = solve_perturbed(tilt.v0 ? *tilt.v0 : cfg.model.u0, tilt, c, T, rb_options.grid);
  const auto rb = rate_breakdown(sol, cfg.model.u0, tilt, c, rb_options);
  report.extra["rate_breakdown"] = to_json(rb);
  report.notes.push_back("event membership is evaluated on the recording grid only");

  const auto times = uniform_times(T, cfg.run.record_points);
  const bool density_event = std::isfinite(cfg.event.density_radius);
  const auto targets = density_event ? frames_at(sol.u, times, cfg.run.hydro_points) : std::vector<DensityProfile>{};
  auto in_event = [&](const SimulationResult& res) {
    const int n = res.trajectory.n;
    for (std::size_t m = 0; m < res.snapshots.size(); ++m) {
      const auto& s = res.snapshots[m];
      if (std::abs(static_cast<double>(s.walker) / n - sol.walker_at(s.time)) > cfg.event.walker_radius) return false;
      if (density_event &&
          block_l1_distance(empirical_density(s.eta), targets[m], eps) > cfg.event.density_radius)
        return false;
    }
    return true;
  };

  for (int n : cfg.model.sizes) {
    Row row;
    row.n = n;
    const auto tilted_setup = setup(cfg, n, true);
    const auto plain_setup = setup(cfg, n, false);

    auto options = base_options(cfg);
    options.accumulate = true;
    options.law = Law::tilted;
    const auto weights = run_replicas<double>(cfg.run.replicas, cfg.run.threads, [&](int r) {
      auto rng = replica_stream(cfg.run.seed, Purpose::importance, n, r);
      const auto init = draw_initial(cfg, tilted_setup, rng);
      const auto res = simulate(tilted_setup.lattice, c, init, &tilt, options, rng);
      return in_event(res) ? std::exp(-n * res.accumulators.log_martingale()) : 0.0;
    });
    const auto is = Estimate::of(weights);
    long accepted = 0;
    for (double w : weights) accepted += w > 0.0;
    row.add("p_is", is);
    row.add("rate", rb.total);
    row.add("accepted_is", static_cast<double>(accepted));
    row.add("minus_log_p_is_over_n", is.mean > 0.0 ? -std::log(is.mean) / n : kInfinity);
    if (accepted == 0) report.notes.push_back("n=" + std::to_string(n) + ": no importance sample hit the event");

    if (n <= cfg.event.naive_max_n) {
      const int reps = cfg.event.naive_replicas > 0 ? cfg.event.naive_replicas : cfg.run.replicas;
      auto plain = base_options(cfg);
      const auto hits = run_replicas<double>(reps, cfg.run.threads, [&](int r) {
        auto rng = replica_stream(cfg.run.seed, Purpose::naive, n, r);
        const auto init = draw_initial(cfg, plain_setup, rng);
        return in_event(simulate(plain_setup.lattice, c, init, nullptr, plain, rng)) ? 1.0 : 0.0;
      });
      const auto naive = Estimate::of(hits);
      row.add("p_naive", naive);
      row.add("minus_log_p_naive_over_n", naive.mean > 0.0 ? -std::log(naive.mean) / n : kInfinity);
      const double combined = std::hypot(is.std_error, naive.std_error);
      report.check("IS and naive agree at n=" + std::to_string(n),
                   std::abs(is.mean - naive.mean) <= std::max(cfg.tol.atol, cfg.tol.z * combined),
                   "IS " + fmt(is.mean) + " +- " + fmt(is.std_error) + ", naive " + fmt(naive.mean) + " +- " +
                       fmt(naive.std_error));
      if (naive.mean > 0.0 && naive.mean < 0.1)
        report.check("IS variance below naive variance at n=" + std::to_string(n),
                     is.std_error * is.std_error * is.replicas < naive.std_error * naive.std_error * naive.replicas,
                     "per-sample variances " + fmt(is.std_error * is.std_error * is.replicas) + " vs " +
                         fmt(naive.std_error * naive.std_error * naive.replicas));
    }
    report.rows.push_back(std::move(row));
  }
  const auto& last = report.rows.back();
  const double observed = last.value("minus_log_p_is_over_n");
  report.check("-(1/n) log P at n=" + std::to_string(last.n) + " within " + fmt(cfg.tol.rate_gap) + " of I_rw + I_ex",
               std::abs(observed - rb.total) <= cfg.tol.rate_gap,
               "observed " + fmt(observed) + ", rate " + fmt(rb.total));
  return report;
}

ExperimentReport run_martingale_check(const ExperimentConfig& cfg) {
  auto report = start(cfg, "martingale");
  const auto& c = cfg.model.rates;
  TiltParams tilt = cfg.tilt.params;
  tilt.v0.reset();
  if (tilt.is_null()) report.notes.push_back("null tilt: the statistic is identically 1");
  for (int n : cfg.model.sizes) {
    const auto s = setup(cfg, n, false);
    SimulationOptions options;
    options.horizon = cfg.model.horizon;
    options.diffusion = cfg.model.diffusion;
    options.accumulate = true;
    const auto samples = run_replicas<double>(cfg.run.replicas, cfg.run.threads, [&](int r) {
      auto rng = replica_stream(cfg.run.seed, Purpose::martingale, n, r);
      const auto init = draw_initial(cfg, s, rng);
      const auto a = simulate(s.lattice, c, init, &tilt, options, rng).accumulators;
      return std::exp(n * (a.log_Ma + a.log_MH));
    });
    Row row;
    row.n = n;
    row.add("martingale", Estimate::of(samples));
    report.check_close("E[M_T] = 1 at n=" + std::to_string(n), row.estimate("martingale"), 1.0, cfg.tol.z,
                       cfg.tol.atol);
    report.rows.push_back(std::move(row));
  }
  return report;
}

std::vector<EnsembleRow> ensembles_table(int max_ell) {
  const auto f = LocalFunction::occupation_product({1, 2});
  std::vector<EnsembleRow> out;
  for (int ell = 2; ell <= max_ell; ++ell) {
    EnsembleRow row;
    row.ell = ell;
    row.matches_closed_form = true;
    for (int k = 0; k <= ell; ++k) {
      const Rational exact = f.canonical_average_exact(k, ell);
      const Rational closed(static_cast<std::int64_t>(k) * (k - 1), static_cast<std::int64_t>(ell) * (ell - 1));
      if (exact != closed) row.matches_closed_form = false;
      const Rational grand = Rational(k, ell) * Rational(k, ell);
      const Rational gap = exact > grand ? exact - grand : grand - exact;
      if (gap > row.sup_gap) row.sup_gap = gap;
    }
    out.push_back(row);
  }
  return out;
}

ExperimentReport run_diagnostics(const ExperimentConfig& cfg) {
  auto report = start(cfg, "diagnostics");
  const auto& c = cfg.model.rates;

  // Ensembles table with a least-squares C / ell fit.
  const auto table = ensembles_table(cfg.run.ensemble_max);
  nlohmann::json ens = nlohmann::json::array();
  double num = 0.0, den = 0.0;
  bool closed = true, bounded = true;
  for (const auto& r : table) {
    const double gap = to_double(r.sup_gap);
    num += gap / r.ell;
    den += 1.0 / (static_cast<double>(r.ell) * r.ell);
    closed = closed && r.matches_closed_form;
    bounded = bounded && r.sup_gap <= Rational(1, r.ell - 1);
    ens.push_back({{"ell", r.ell}, {"sup_gap", to_string(r.sup_gap)}, {"sup_gap_value", gap}});
  }
  report.extra["ensembles"] = {{"rows", ens}, {"fit_C", num / den}};
  report.check("canonical averages equal k(k-1)/(ell(ell-1))", closed, "ell <= " + std::to_string(cfg.run.ensemble_max));
  report.check("sup_k gap <= 1/(ell-1)", bounded, "fit C = " + fmt(num / den));

  // Replacement errors and energy norms from recorded trajectories.
  for (int n : cfg.model.sizes) {
    const auto s = setup(cfg, n, false);
    auto options = base_options(cfg);
    options.record_events = true;
    struct Sample {
      std::vector<double> plus, minus;
      double energy = 0.0;
    };
    const auto samples = run_replicas<Sample>(cfg.run.replicas, cfg.run.threads, [&](int r) {
      auto rng = replica_stream(cfg.run.seed, Purpose::replacement, n, r);
      const auto init = draw_initial(cfg, s, rng);
      const auto res = simulate(s.lattice, c, init, nullptr, options, rng);
      Sample out;
      for (double eps : cfg.run.diagnostic_eps) {
        out.plus.push_back(std::abs(replacement_error(res.trajectory, c.plus(), eps, cfg.model.horizon)));
        out.minus.push_back(std::abs(replacement_error(res.trajectory, c.minus(), eps, cfg.model.horizon)));
      }
      out.energy = energy_norm(record_path_field(res).fixed);
      return out;
    });
    Row row;
    row.n = n;
    for (std::size_t e = 0; e < cfg.run.diagnostic_eps.size(); ++e) {
      std::vector<double> p, m;
      for (const auto& x : samples) {
        p.push_back(x.plus[e]);
        m.push_back(x.minus[e]);
      }
      row.add("replacement_plus_eps" + fmt(cfg.run.diagnostic_eps[e]), Estimate::of(p));
      row.add("replacement_minus_eps" + fmt(cfg.run.diagnostic_eps[e]), Estimate::of(m));
    }
    std::vector<double> energy;
    for (const auto& x : samples) energy.push_back(x.energy);
    row.add("energy_norm", Estimate::of(energy));
    report.rows.push_back(std::move(row));
  }

  const auto mart = run_martingale_check(cfg);
  for (const auto& ch : mart.checks) report.checks.push_back(ch);
  nlohmann::json mj = nlohmann::json::array();
  for (const auto& r : mart.rows) mj.push_back({{"n", r.n}, {"martingale", to_json(r.estimate("martingale"))}});
  report.extra["martingale"] = mj;
  return report;
}

}  // namespace rwdre
