#include "rwdre/harness/report.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include <boost/accumulators/accumulators.hpp>
#include <boost/accumulators/statistics/mean.hpp>
#include <boost/accumulators/statistics/stats.hpp>
#include <boost/accumulators/statistics/variance.hpp>

namespace rwdre {
namespace {

nlohmann::json number(double x) {
  if (std::isfinite(x)) return x;
  return std::isnan(x) ? "nan" : (x > 0 ? "inf" : "-inf");
}

std::string csv_number(double x) {
  std::ostringstream s;
  s.precision(12);
  s << x;
  return s.str();
}

}  // namespace

Estimate Estimate::of(const std::vector<double>& samples) {
  namespace acc = boost::accumulators;
  acc::accumulator_set<double, acc::stats<acc::tag::mean, acc::tag::variance>> a;
  for (double x : samples) a(x);
  Estimate e;
  e.replicas = static_cast<long>(samples.size());
  if (samples.empty()) return e;
  e.mean = acc::mean(a);
  if (samples.size() > 1) {
    const double n = static_cast<double>(samples.size());
    e.std_error = std::sqrt(std::max(0.0, acc::variance(a)) / (n - 1.0));
  }
  return e;
}

const Estimate& Row::estimate(const std::string& name) const {
  for (const auto& [k, e] : estimates)
    if (k == name) return e;
  throw std::out_of_range("no estimate '" + name + "'");
}

double Row::value(const std::string& name) const {
  for (const auto& [k, v] : values)
    if (k == name) return v;
  throw std::out_of_range("no value '" + name + "'");
}

bool ExperimentReport::passed() const noexcept {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

const Row& ExperimentReport::row(int n) const {
  for (const auto& r : rows)
    if (r.n == n) return r;
  throw std::out_of_range("no row for n = " + std::to_string(n));
}

void ExperimentReport::check(std::string name, bool pass, std::string detail) {
  checks.push_back({std::move(name), pass, std::move(detail)});
}

bool ExperimentReport::check_close(const std::string& name, const Estimate& e, double reference, double z,
                                   double atol) {
  const double allowed = std::max(atol, z * e.std_error);
  const bool ok = std::abs(e.mean - reference) <= allowed;
  std::ostringstream d;
  d.precision(6);
  d << "estimate " << e.mean << " +- " << e.std_error << " (" << e.replicas << " replicas), reference " << reference
    << ", allowed " << allowed;
  check(name, ok, d.str());
  return ok;
}

nlohmann::json to_json(const Estimate& e) {
  return {{"mean", number(e.mean)}, {"stderr", number(e.std_error)}, {"replicas", e.replicas}};
}

nlohmann::json to_json(const ExperimentReport& report) {
  nlohmann::json out;
  out["kind"] = report.kind;
  out["fingerprint"] = {{"seed", report.fingerprint.seed},
                        {"version", report.fingerprint.version},
                        {"config_hash", hex(report.fingerprint.config_hash)}};
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : report.rows) {
    nlohmann::json row;
    row["n"] = r.n;
    for (const auto& [k, e] : r.estimates) row["estimates"][k] = to_json(e);
    for (const auto& [k, v] : r.values) row["values"][k] = number(v);
    rows.push_back(row);
  }
  out["rows"] = rows;
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : report.checks) checks.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
  out["checks"] = checks;
  out["notes"] = report.notes;
  out["passed"] = report.passed();
  if (!report.extra.empty()) out["extra"] = report.extra;
  return out;
}

void write_csv(std::ostream& out, const ExperimentReport& report) {
  if (report.rows.empty()) return;
  const auto& first = report.rows.front();
  out << "n";
  for (const auto& [k, e] : first.estimates) out << ',' << k << "_mean," << k << "_stderr," << k << "_replicas";
  for (const auto& [k, v] : first.values) out << ',' << k;
  out << '\n';
  for (const auto& r : report.rows) {
    out << r.n;
    for (const auto& [k, e] : r.estimates)
      out << ',' << csv_number(e.mean) << ',' << csv_number(e.std_error) << ',' << e.replicas;
    for (const auto& [k, v] : r.values) out << ',' << csv_number(v);
    out << '\n';
  }
}

std::filesystem::path write_report(const std::filesystem::path& dir, const ExperimentReport& report,
                                   const std::string& format) {
  std::filesystem::create_directories(dir);
  std::filesystem::path path;
  if (format == "csv") {
    path = dir / (report.kind + ".csv");
    std::ofstream out(path);
    write_csv(out, report);
  } else if (format == "json") {
    path = dir / (report.kind + ".json");
    std::ofstream out(path);
    out << to_json(report).dump(2) << '\n';
  } else {
    throw std::invalid_argument("unknown format '" + format + "'");
  }
  std::ofstream summary(dir / (report.kind + "_checks.txt"));
  for (const auto& c : report.checks) summary << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
  return path;
}

std::string hex(std::uint64_t value) {
  std::ostringstream s;
  s << std::hex << std::setw(16) << std::setfill('0') << value;
  return s.str();
}

}  // namespace rwdre
