// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "rwdre/dynamics.hpp"
#include "rwdre/fields.hpp"
#include "rwdre/harness/experiments.hpp"
#include "rwdre/hydro.hpp"
#include "rwdre/ldp.hpp"
#include "rwdre/measures.hpp"
#include "rwdre/trajectory_io.hpp"

using namespace rwdre;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    detail << (ok ? "" : "[x] ") << what << "; ";
  }
};

std::string num(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

bool strictly_decreasing(const ExperimentReport& rep, const std::string& name, std::string& trail) {
  bool ok = true;
  double prev = 0.0;
  for (std::size_t i = 0; i < rep.rows.size(); ++i) {
    const double v = rep.rows[i].estimate(name).mean;
    trail += (i ? " > " : "") + num(v);
    if (i > 0 && !(v < prev)) ok = false;
    prev = v;
  }
  return ok;
}

void decreasing(Outcome& o, const ExperimentReport& rep, const std::string& name) {
  std::string trail;
  const bool ok = strictly_decreasing(rep, name, trail);
  o.require(ok, name + " " + trail);
}

TestFunctionH cosine_H(double T) { return TestFunctionH::cosine_mode(T, 1, 0.2); }

ExperimentConfig base(ExperimentKind kind, std::vector<int> sizes, int replicas) {
  ExperimentConfig cfg;
  cfg.kind = kind;
  cfg.model.sizes = std::move(sizes);
  cfg.model.horizon = 1.0;
  cfg.model.rates = LocalRate::intro_example();
  cfg.run.replicas = replicas;
  cfg.run.seed = 20240501;
  return cfg;
}

Outcome velocity() {
  Outcome o;
  const auto poly = mean_field_polynomials(LocalRate::intro_example());
  for (auto rho : {Rational(0), Rational(1, 4), Rational(1, 2), Rational(1)}) {
    const Rational expected = (2 * rho - 1) / 3;
    o.require(poly.drift(rho) == expected, "v(" + to_string(rho) + ") = " +
                                               to_string(poly.drift(rho)));
  }
  auto cfg = base(ExperimentKind::simulate, {256}, 500);
  cfg.model.u0 = DensityProfile::constant(0.25);
  const auto rep = run_velocity_experiment(cfg);
  const auto& e = rep.row(256).estimate("velocity");
  o.require(std::abs(e.mean + 1.0 / 6) <= 4 * e.std_error,
            "x_T/T = " + num(e.mean) + " +- " + num(e.std_error) + " vs -1/6");
  return o;
}

Outcome hydro_lln() {
  Outcome o;
  auto cfg = base(ExperimentKind::lln, {32, 64, 128, 256}, 200);
  cfg.model.u0 = DensityProfile::cosine(0.5, 0.25);
  const auto rep = run_lln_experiment(cfg);
  decreasing(o, rep, "l1_T");
  decreasing(o, rep, "walker_sup");
  const double l1 = rep.row(256).estimate("l1_T").mean;
  o.require(l1 <= 0.05, "L1 at n=256 " + num(l1));
  return o;
}

Outcome martingale() {
  Outcome o;
  auto cfg = base(ExperimentKind::diagnostics, {32, 64}, 2000);
  cfg.model.u0 = DensityProfile::cosine(0.5, 0.25);
  // Second moment grows like exp(n * const * tilt^2); small tilts keep the
  // standard error meaningful at n = 64.
  cfg.tilt.params.H = TestFunctionH::cosine_mode(1.0, 1, 0.05);
  cfg.tilt.params.a = TimeFunction::constant(0.1);
  const auto rep = run_martingale_check(cfg);
  for (const auto& row : rep.rows) {
    const auto& e = row.estimate("martingale");
    o.require(std::abs(e.mean - 1.0) <= 4 * e.std_error,
              "n=" + std::to_string(row.n) + " mean " + num(e.mean) + " +- " + num(e.std_error));
  }
  return o;
}

Outcome perturbed_lln() {
  Outcome o;
  auto cfg = base(ExperimentKind::perturbed_lln, {32, 64, 128, 256}, 200);
  cfg.model.u0 = DensityProfile::cosine(0.5, 0.25);
  cfg.tilt.params.H = cosine_H(1.0);
  cfg.tilt.params.a = TimeFunction::constant(0.3);
  const auto rep = run_perturbed_lln_experiment(cfg);
  decreasing(o, rep, "moving_l1_T");
  decreasing(o, rep, "walker_sup");
  o.detail << "fixed-frame L1 at n=256 " << num(rep.row(256).estimate("l1_T").mean) << "; ";
  return o;
}

Outcome entropy() {
  Outcome o;
  auto cfg = base(ExperimentKind::entropy, {32, 64, 128}, 400);
  cfg.model.u0 = DensityProfile::constant(0.5);
  cfg.tilt.params.a = TimeFunction::constant(0.3);
  const auto rep = run_entropy_experiment(cfg);
  const double limit = rep.rows.front().value("limit");
  o.require(std::abs(limit - (0.3 * std::sinh(0.3) - std::cosh(0.3) + 1)) <= 1e-8, "h + J + j = " + num(limit));
  double prev = kInfinity;
  for (const auto& row : rep.rows) {
    const double gap = row.value("gap");
    o.require(gap < prev, "n=" + std::to_string(row.n) + " (1/n)H = " + num(row.estimate("entropy").mean) +
                              " +- " + num(row.estimate("entropy").std_error) + ", gap " + num(gap));
    prev = gap;
  }
  o.require(rep.rows.back().value("gap") <= 0.05, "gap at n=128 <= 0.05");
  return o;
}

Outcome duality() {
  Outcome o;
  Stream rng(77, 0);
  double worst_sup = 0.0, worst_forms = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double xp = 10 * rng.uniform() - 5, vp = 0.01 + 3 * rng.uniform(), vm = 0.01 + 3 * rng.uniform();
    double best = -kInfinity;
    for (int k = -20000; k <= 20000; ++k) best = std::max(best, legendre_objective(k * 1e-3, xp, vp, vm));
    worst_sup = std::max(worst_sup, std::abs(pointwise_cost(xp, vp, vm) - best));
    worst_forms = std::max(worst_forms, std::abs(a_star_plus_form(xp, vp, vm) - a_star_minus_form(xp, vp, vm)));
  }
  o.require(worst_sup <= 1e-4, "max |closed form - grid sup| " + num(worst_sup));
  o.require(worst_forms <= 1e-10, "max |a+ - a-| " + num(worst_forms));
  return o;
}

Outcome zero_cost() {
  Outcome o;
  const auto u0 = DensityProfile::cosine(0.5, 0.25);
  const auto c = LocalRate::intro_example();
  const auto sol = solve_perturbed(u0, TiltParams{}, c, 1.0, SpaceTimeGrid::make(256, 1.0, 100));
  const double iex = I_ex(sol.u, u0).value;
  const auto irw = I_rw(WalkerPath::from_samples(sol.u.times(), sol.f), density_of(sol.u), c);
  const double h = entropy_h(u0, u0);
  o.require(std::abs(iex) <= 1e-3, "I_ex(heat) " + num(iex));
  o.require(std::abs(irw.value) <= 1e-3, "I_rw(LLN path) " + num(irw.value));
  o.require(h == 0.0, "h(u0|u0) " + num(h));
  return o;
}

Outcome ensembles() {
  Outcome o;
  const auto rows = ensembles_table(12);
  for (const auto& r : rows)
    o.require(r.matches_closed_form, "ell=" + std::to_string(r.ell) + " gap " +
                                         to_string(r.sup_gap));
  o.require(rows.size() == 11, "ell = 2..12");
  return o;
}

Outcome importance() {
  Outcome o;
  auto cfg = base(ExperimentKind::importance, {16, 128}, 1000);
  cfg.model.u0 = DensityProfile::constant(0.5);
  cfg.tilt.params.a = TimeFunction::constant(0.3);
  cfg.event.walker_radius = 0.15;
  cfg.event.naive_max_n = 16;
  const auto rep = run_importance_sampling(cfg);
  const auto& small = rep.row(16);
  const auto& is = small.estimate("p_is");
  const auto& naive = small.estimate("p_naive");
  o.require(std::abs(is.mean - naive.mean) <= 4 * std::hypot(is.std_error, naive.std_error),
            "n=16 IS " + num(is.mean) + " +- " + num(is.std_error) + " vs naive " + num(naive.mean) + " +- " +
                num(naive.std_error));
  const auto& large = rep.row(128);
  const double rate = large.value("minus_log_p_is_over_n");
  const double target = large.value("rate");
  o.require(std::abs(rate - target) <= 0.15, "n=128 -(1/n)log P " + num(rate) + " vs I_rw + I_ex " + num(target));
  return o;
}

Outcome invariants() {
  Outcome o;
  const auto c = LocalRate::intro_example();
  const auto u0 = DensityProfile::cosine(0.5, 0.25);
  TiltParams tilt;
  tilt.H = cosine_H(1.0);
  tilt.a = TimeFunction::constant(0.3);

  bool counts = true, ranges = true, replay = true;
  for (int n : {16, 64}) {
    TorusLattice lattice(n);
    SimulationOptions options;
    options.record_times = uniform_times(1.0, 200);
    options.record_events = true;
    options.accumulate = true;
    options.law = Law::tilted;
    for (int r = 0; r < 20; ++r) {
      auto run = [&] {
        Stream rng(99, static_cast<std::uint64_t>(n * 1000 + r));
        const auto eta = sample_product_profile(lattice, u0, rng);
        return simulate(lattice, c, eta, &tilt, options, rng);
      };
      const auto a = run();
      const auto b = run();
      const int k = a.trajectory.initial.particle_count();
      for (const auto& snap : a.snapshots) counts = counts && snap.eta.particle_count() == k;
      Configuration eta = a.trajectory.initial;
      for (const auto& ev : a.trajectory.events)
        if (ev.kind == EventKind::exchange) {
          eta.swap_sites(ev.site, lattice.wrap(ev.site + 1));
          counts = counts && eta.particle_count() == k;
        }
      counts = counts && eta == a.trajectory.final_state;
      const auto fields = record_path_field(a);
      for (std::size_t m = 0; m < fields.fixed.size(); ++m) {
        const auto f = fields.fixed.frame(m);
        ranges = ranges && f.min_value() >= 0.0 && f.max_value() <= 1.0;
      }
      std::ostringstream sa, sb;
      write_trajectory(sa, a.trajectory, 99, tilt.hash());
      write_trajectory(sb, b.trajectory, 99, tilt.hash());
      replay = replay && sa.str() == sb.str() && a.accumulators.log_martingale() == b.accumulators.log_martingale();
    }
  }
  o.require(counts, "particle count constant along every trajectory");
  o.require(replay, "replay byte-identical under a fixed seed");

  const auto sol = solve_perturbed(u0, tilt, c, 1.0, SpaceTimeGrid::make(256, 1.0, 100));
  for (std::size_t m = 0; m < sol.u.size(); ++m) {
    const auto f = sol.u.frame(m);
    ranges = ranges && f.min_value() >= 0.0 && f.max_value() <= 1.0;
  }
  o.require(sol.max_mass_drift <= 1e-12, "PDE mass drift " + num(sol.max_mass_drift));
  o.require(sol.clamp_count == 0, "clamped nodes " + std::to_string(sol.clamp_count));
  o.require(ranges, "all densities in [0, 1]");

  auto cfg = base(ExperimentKind::lln, {16, 32}, 24);
  cfg.run.threads = 1;
  const auto one = to_json(run_lln_experiment(cfg)).dump();
  cfg.run.threads = 4;
  const auto four = to_json(run_lln_experiment(cfg)).dump();
  o.require(one == four, "reports identical across thread counts");
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"mean-field velocity", velocity},
      {"hydrodynamic LLN", hydro_lln},
      {"martingale unit expectation", martingale},
      {"perturbed hydrodynamic limit", perturbed_lln},
      {"relative-entropy convergence", entropy},
      {"Legendre duality", duality},
      {"zero-cost paths", zero_cost},
      {"equivalence of ensembles", ensembles},
      {"importance-sampling consistency", importance},
      {"conservation and invariants", invariants},
  };
  int failures = 0;
  std::vector<bool> selected(criteria.size(), argc == 1);
  for (int a = 1; a < argc; ++a) {
    const int k = std::atoi(argv[a]);
    if (k < 1 || k > static_cast<int>(criteria.size())) {
      std::cerr << "usage: acceptance [criterion numbers 1-" << criteria.size() << "]\n";
      return 1;
    }
    selected[static_cast<std::size_t>(k - 1)] = true;
  }
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (!selected[i]) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << "error: " << e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!o.pass) ++failures;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << i + 1 << " (" << criteria[i].first << ", "
              << num(secs) << " s): " << o.detail.str() << std::endl;
  }
  std::cout << (failures ? std::to_string(failures) + " criteria failed" : "all criteria passed") << std::endl;
  return failures ? 1 : 0;
}
