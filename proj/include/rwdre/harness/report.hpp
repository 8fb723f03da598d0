#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

namespace rwdre {

inline constexpr const char* kVersion = "0.1.0";

/// Monte Carlo mean with its standard error.
struct Estimate {
  double mean = 0.0;
  double std_error = 0.0;
  long replicas = 0;

  static Estimate of(const std::vector<double>& samples);
};

struct Row {
  int n = 0;
  std::vector<std::pair<std::string, Estimate>> estimates;
  std::vector<std::pair<std::string, double>> values;  // deterministic references

  void add(std::string name, Estimate e) { estimates.emplace_back(std::move(name), e); }
  void add(std::string name, double v) { values.emplace_back(std::move(name), v); }
  const Estimate& estimate(const std::string& name) const;
  double value(const std::string& name) const;
};

struct Check {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct Fingerprint {
  std::uint64_t seed = 0;
  std::string version = kVersion;
  std::uint64_t config_hash = 0;
};

struct ExperimentReport {
  std::string kind;
  Fingerprint fingerprint;
  std::vector<Row> rows;
  std::vector<Check> checks;
  std::vector<std::string> notes;
  nlohmann::json extra = nlohmann::json::object();

  bool passed() const noexcept;
  const Row& row(int n) const;
  void check(std::string name, bool pass, std::string detail);
  /// |estimate - reference| <= max(atol, z * stderr).
  bool check_close(const std::string& name, const Estimate& e, double reference, double z, double atol);
};

nlohmann::json to_json(const Estimate& e);
nlohmann::json to_json(const ExperimentReport& report);
/// One line per n: n, then mean/stderr/replicas of every estimate and every reference value.
void write_csv(std::ostream& out, const ExperimentReport& report);
/// Writes report.json or report.csv (plus a check summary in both cases) into dir.
std::filesystem::path write_report(const std::filesystem::path& dir, const ExperimentReport& report,
                                   const std::string& format);

/// FNV-1a hex digest used in file names and fingerprints.
std::string hex(std::uint64_t value);

}  // namespace rwdre
