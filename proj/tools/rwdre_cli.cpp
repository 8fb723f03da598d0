#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "rwdre/fields.hpp"
#include "rwdre/harness/config.hpp"
#include "rwdre/harness/experiments.hpp"
#include "rwdre/harness/report.hpp"
#include "rwdre/hydro.hpp"
#include "rwdre/measures.hpp"
#include "rwdre/rate_breakdown.hpp"
#include "rwdre/trajectory_io.hpp"

namespace fs = std::filesystem;
using namespace rwdre;

namespace {

struct Common {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::string format = "json";
};

ExperimentConfig load(const Common& opts) {
  ExperimentConfig cfg = opts.config.empty() ? ExperimentConfig{} : load_config(opts.config);
  if (opts.seed) cfg.run.seed = *opts.seed;
  if (opts.threads) cfg.run.threads = *opts.threads;
  if (!opts.out.empty()) cfg.run.output = opts.out;
  cfg.validate();
  return cfg;
}

int finish(const ExperimentReport& report, const ExperimentConfig& cfg, const Common& opts) {
  const auto path = write_report(cfg.run.output, report, opts.format);
  for (const auto& c : report.checks) std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
  std::cout << "report: " << path.string() << '\n';
  return report.passed() ? 0 : 2;
}

int cmd_simulate(const Common& opts) {
  const auto cfg = load(opts);
  const auto report = run_velocity_experiment(cfg);
  const fs::path dir = cfg.run.output;
  fs::create_directories(dir);
  for (int n : cfg.model.sizes) {
    TorusLattice lattice(n);
    auto rng = replica_stream(cfg.run.seed, Purpose::velocity, n, 0);
    const auto eta = sample_product_profile(lattice, cfg.model.u0, rng);
    SimulationOptions options;
    options.horizon = cfg.model.horizon;
    options.diffusion = cfg.model.diffusion;
    options.record_times = uniform_times(cfg.model.horizon, cfg.run.record_points);
    options.record_events = true;
    const auto res = simulate(lattice, cfg.model.rates, eta, nullptr, options, rng);
    const std::string tag = "_n" + std::to_string(n);
    write_trajectory_file((dir / ("trajectory" + tag + ".rwdt")).string(), res.trajectory, cfg.run.seed, 0);
    const auto fields = record_path_field(res);
    std::ofstream fixed(dir / ("density" + tag + ".csv"));
    write_path_field_csv(fixed, fields.fixed, n);
    std::ofstream moving(dir / ("moving_density" + tag + ".csv"));
    write_path_field_csv(moving, fields.moving, n);
    std::ofstream walker(dir / ("walker" + tag + ".csv"));
    write_walker_csv(walker, fields.fixed);
  }
  return finish(report, cfg, opts);
}

int cmd_hydro(const Common& opts) {
  const auto cfg = load(opts);
  const auto& tilt = cfg.tilt.params;
  const auto sol = solve_perturbed(tilt.v0 ? *tilt.v0 : cfg.model.u0, tilt, cfg.model.rates, cfg.model.horizon,
                                   hydro_grid(cfg));
  const fs::path dir = cfg.run.output;
  fs::create_directories(dir);
  const int points = cfg.run.hydro_points;
  std::ofstream u(dir / "hydro_u.csv");
  write_path_field_csv(u, sol.u, points);
  std::ofstream u_hat(dir / "hydro_u_hat.csv");
  write_path_field_csv(u_hat, sol.u_hat, points);
  std::ofstream f(dir / "hydro_walker.csv");
  f << "t,f\n";
  for (std::size_t m = 0; m < sol.f.size(); ++m) f << sol.u.times()[m] << ',' << sol.f[m] << '\n';

  ExperimentReport report;
  report.kind = "hydro";
  report.fingerprint.seed = cfg.run.seed;
  report.fingerprint.config_hash = cfg.hash();
  Row row;
  row.n = points;
  row.add("f_T", sol.f.back());
  row.add("max_mass_drift", sol.max_mass_drift);
  row.add("clamp_count", static_cast<double>(sol.clamp_count));
  report.rows.push_back(row);
  report.check("mass conserved to 1e-12", sol.max_mass_drift <= 1e-12, "drift " + nlohmann::json(sol.max_mass_drift).dump());
  return finish(report, cfg, opts);
}

int cmd_rate(const Common& opts) {
  const auto cfg = load(opts);
  RateBreakdownOptions options;
  options.grid = hydro_grid(cfg);
  const auto rb = rate_breakdown(cfg.model.u0, cfg.tilt.params, cfg.model.rates, cfg.model.horizon, options);
  const fs::path dir = cfg.run.output;
  fs::create_directories(dir);
  auto json = to_json(rb);
  json["config_hash"] = hex(cfg.hash());
  std::ofstream(dir / "rate.json") << json.dump(2) << '\n';
  for (const char* key : {"h", "J", "j", "I_ex", "I_rw", "total"}) std::cout << key << " = " << json[key] << '\n';
  std::cout << "report: " << (dir / "rate.json").string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SSEP random walk simulator and large-deviation toolkit"};
  app.require_subcommand(1);
  Common opts;
  bool perturbed = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opts.config, "INI or JSON experiment configuration")->check(CLI::ExistingFile);
    sub->add_option("--out", opts.out, "output directory");
    sub->add_option("--seed", opts.seed, "master seed");
    sub->add_option("--threads", opts.threads, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--format", opts.format, "report format")->check(CLI::IsMember({"csv", "json"}));
  };
  auto* simulate_cmd = app.add_subcommand("simulate", "simulate replicas, write paths and the drift estimate");
  auto* hydro_cmd = app.add_subcommand("hydro", "solve the (perturbed) hydrodynamic equations");
  auto* rate_cmd = app.add_subcommand("rate", "rate-function breakdown of the configured tilt");
  auto* lln_cmd = app.add_subcommand("lln-check", "law-of-large-numbers convergence study");
  lln_cmd->add_flag("--perturbed", perturbed, "simulate the tilted law against solve_perturbed");
  auto* entropy_cmd = app.add_subcommand("entropy-check", "relative entropy against h + J + j");
  auto* is_cmd = app.add_subcommand("is-estimate", "naive and importance-sampled tube probabilities");
  auto* diag_cmd = app.add_subcommand("diagnostics", "replacement, ensembles, energy and martingale diagnostics");
  for (auto* sub : {simulate_cmd, hydro_cmd, rate_cmd, lln_cmd, entropy_cmd, is_cmd, diag_cmd}) add_common(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*simulate_cmd) return cmd_simulate(opts);
    if (*hydro_cmd) return cmd_hydro(opts);
    if (*rate_cmd) return cmd_rate(opts);
    const auto cfg = load(opts);
    if (*lln_cmd) return finish(perturbed ? run_perturbed_lln_experiment(cfg) : run_lln_experiment(cfg), cfg, opts);
    if (*entropy_cmd) return finish(run_entropy_experiment(cfg), cfg, opts);
    if (*is_cmd) return finish(run_importance_sampling(cfg), cfg, opts);
    if (*diag_cmd) return finish(run_diagnostics(cfg), cfg, opts);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
