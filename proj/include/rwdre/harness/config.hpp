#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rwdre/local_function.hpp"
#include "rwdre/profile.hpp"
#include "rwdre/test_function.hpp"
#include "rwdre/tilt.hpp"

namespace rwdre {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ExperimentKind { simulate, hydro, rate, lln, perturbed_lln, entropy, importance, diagnostics };

const char* to_string(ExperimentKind kind) noexcept;
ExperimentKind parse_experiment_kind(const std::string& text);

struct ModelConfig {
  std::vector<int> sizes{32, 64};
  double horizon = 1.0;
  std::string rates_spec = "intro";
  LocalRate rates = LocalRate::intro_example();
  std::string u0_spec = "constant 0.5";
  DensityProfile u0 = DensityProfile::constant(0.5);
  double diffusion = 1.0;
};

struct TiltConfig {
  std::string v0_spec;
  std::string H_spec;
  std::string a_spec;
  TiltParams params;
};

struct Tolerances {
  double z = 4.0;                // standard errors allowed
  double atol = 0.0;             // absolute floor
  double l1_max = 0.05;          // block L1 error at the largest n
  double block_eps = 0.4;        // coarse-graining block for density distances
  double entropy_gap = 0.05;     // |(1/n)H - (h + J + j)| at the largest n
  double rate_gap = 0.15;        // |-(1/n) log P - (I_rw + I_ex)| at the largest n
};

struct RunConfig {
  int replicas = 100;
  std::uint64_t seed = 1;
  int record_points = 100;
  int threads = 1;
  std::string output = "out";
  int hydro_points = 256;
  std::vector<double> diagnostic_eps{0.05, 0.1, 0.2};
  int ensemble_max = 12;
};

struct EventConfig {
  double density_radius = std::numeric_limits<double>::infinity();
  double walker_radius = std::numeric_limits<double>::infinity();
  int naive_replicas = 0;  // 0: same as run.replicas
  int naive_max_n = 64;    // naive Monte Carlo only for n up to this size
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::simulate;
  ModelConfig model;
  TiltConfig tilt;
  RunConfig run;
  EventConfig event;
  Tolerances tol;

  /// Canonical text of every field; hashed into report fingerprints.
  std::string canonical() const;
  std::uint64_t hash() const;
  /// Throws ConfigError when an invariant fails.
  void validate() const;
};

/// Flat INI: [model], [tilt], [run], [event], [tolerances]. Relative file
/// references resolve against base_dir.
ExperimentConfig parse_ini_config(const std::string& text, const std::filesystem::path& base_dir = {});
ExperimentConfig parse_json_config(const std::string& text, const std::filesystem::path& base_dir = {});
/// Chooses the parser from the extension (.json or anything else).
ExperimentConfig load_config(const std::filesystem::path& path);

/// "constant r" | "cosine mean amp [k]" | "knots x:v,x:v,..." | "values v0 v1 ..." (uniform knots).
DensityProfile parse_profile(const std::string& spec);
/// "intro" | "archetype alpha beta" | "constant p m" | "file PATH" (LocalRate text block).
LocalRate parse_rates(const std::string& spec, const std::filesystem::path& base_dir = {});
/// "cos k degree coef; sin k degree coef; ..." ("0" or empty: zero).
TestFunctionH parse_test_function(const std::string& spec, double horizon);
/// "constant c" | "poly c0 c1 ...".
TimeFunction parse_time_function(const std::string& spec);
/// Comma or space separated integers.
std::vector<int> parse_int_list(const std::string& text);

}  // namespace rwdre
