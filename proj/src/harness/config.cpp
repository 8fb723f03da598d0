#include "rwdre/harness/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "json.hpp"

namespace rwdre {
namespace {

using Flat = std::map<std::string, std::string>;

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "model.n", "model.T", "model.rates", "model.u0", "model.D",
      "tilt.v0", "tilt.H", "tilt.a",
      "run.kind", "run.replicas", "run.seed", "run.record_points", "run.threads", "run.output",
      "run.hydro_points", "run.diagnostic_eps", "run.ensemble_max",
      "event.density_radius", "event.walker_radius", "event.naive_replicas", "event.naive_max_n",
      "tolerances.z", "tolerances.atol", "tolerances.l1_max", "tolerances.block_eps",
      "tolerances.entropy_gap", "tolerances.rate_gap"};
  return keys;
}

std::vector<std::string> words(const std::string& text) {
  std::vector<std::string> out;
  std::string trimmed = boost::algorithm::trim_copy(text);
  if (trimmed.empty()) return out;
  boost::algorithm::split(out, trimmed, boost::is_any_of(" \t,"), boost::token_compress_on);
  return out;
}

double to_number(const std::string& text, const std::string& what) {
  const std::string t = boost::algorithm::trim_copy(text);
  if (t == "inf" || t == "infinity") return std::numeric_limits<double>::infinity();
  try {
    std::size_t used = 0;
    const double v = std::stod(t, &used);
    if (used != t.size()) throw std::invalid_argument(t);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(what + ": expected a number, got '" + text + "'");
  }
}

int to_int(const std::string& text, const std::string& what) {
  const double v = to_number(text, what);
  if (v != std::floor(v) || std::abs(v) > 2e9) throw ConfigError(what + ": expected an integer, got '" + text + "'");
  return static_cast<int>(v);
}

std::uint64_t to_u64(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    const auto t = boost::algorithm::trim_copy(text);
    const auto v = std::stoull(t, &used, 0);
    if (used != t.size()) throw std::invalid_argument(t);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(what + ": expected an unsigned integer, got '" + text + "'");
  }
}

ExperimentConfig build(const Flat& flat, const std::filesystem::path& base_dir) {
  for (const auto& [key, value] : flat)
    if (!known_keys().count(key)) throw ConfigError("unknown configuration key '" + key + "'");
  auto get = [&](const std::string& key) -> const std::string* {
    auto it = flat.find(key);
    return it == flat.end() ? nullptr : &it->second;
  };

  ExperimentConfig cfg;
  if (auto v = get("run.kind")) cfg.kind = parse_experiment_kind(*v);

  auto& m = cfg.model;
  if (auto v = get("model.n")) m.sizes = parse_int_list(*v);
  if (auto v = get("model.T")) m.horizon = to_number(*v, "model.T");
  if (auto v = get("model.D")) m.diffusion = to_number(*v, "model.D");
  if (auto v = get("model.rates")) {
    m.rates_spec = *v;
    m.rates = parse_rates(*v, base_dir);
  }
  if (auto v = get("model.u0")) {
    m.u0_spec = *v;
    m.u0 = parse_profile(*v);
  }

  auto& t = cfg.tilt;
  if (auto v = get("tilt.v0"); v && !boost::algorithm::trim_copy(*v).empty()) {
    t.v0_spec = *v;
    t.params.v0 = parse_profile(*v);
  }
  if (auto v = get("tilt.H"); v && !boost::algorithm::trim_copy(*v).empty()) {
    t.H_spec = *v;
    t.params.H = parse_test_function(*v, m.horizon);
  }
  if (auto v = get("tilt.a"); v && !boost::algorithm::trim_copy(*v).empty()) {
    t.a_spec = *v;
    t.params.a = parse_time_function(*v);
  }

  auto& r = cfg.run;
  if (auto v = get("run.replicas")) r.replicas = to_int(*v, "run.replicas");
  if (auto v = get("run.seed")) r.seed = to_u64(*v, "run.seed");
  if (auto v = get("run.record_points")) r.record_points = to_int(*v, "run.record_points");
  if (auto v = get("run.threads")) r.threads = to_int(*v, "run.threads");
  if (auto v = get("run.output")) r.output = boost::algorithm::trim_copy(*v);
  if (auto v = get("run.hydro_points")) r.hydro_points = to_int(*v, "run.hydro_points");
  if (auto v = get("run.ensemble_max")) r.ensemble_max = to_int(*v, "run.ensemble_max");
  if (auto v = get("run.diagnostic_eps")) {
    r.diagnostic_eps.clear();
    for (const auto& w : words(*v)) r.diagnostic_eps.push_back(to_number(w, "run.diagnostic_eps"));
  }

  auto& e = cfg.event;
  if (auto v = get("event.density_radius")) e.density_radius = to_number(*v, "event.density_radius");
  if (auto v = get("event.walker_radius")) e.walker_radius = to_number(*v, "event.walker_radius");
  if (auto v = get("event.naive_replicas")) e.naive_replicas = to_int(*v, "event.naive_replicas");
  if (auto v = get("event.naive_max_n")) e.naive_max_n = to_int(*v, "event.naive_max_n");

  auto& tol = cfg.tol;
  if (auto v = get("tolerances.z")) tol.z = to_number(*v, "tolerances.z");
  if (auto v = get("tolerances.atol")) tol.atol = to_number(*v, "tolerances.atol");
  if (auto v = get("tolerances.l1_max")) tol.l1_max = to_number(*v, "tolerances.l1_max");
  if (auto v = get("tolerances.block_eps")) tol.block_eps = to_number(*v, "tolerances.block_eps");
  if (auto v = get("tolerances.entropy_gap")) tol.entropy_gap = to_number(*v, "tolerances.entropy_gap");
  if (auto v = get("tolerances.rate_gap")) tol.rate_gap = to_number(*v, "tolerances.rate_gap");

  cfg.validate();
  return cfg;
}

std::string json_scalar(const nlohmann::json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_array()) {
    std::string out;
    for (const auto& x : v) {
      if (!out.empty()) out += ",";
      out += json_scalar(x);
    }
    return out;
  }
  if (v.is_number_unsigned()) return std::to_string(v.get<std::uint64_t>());
  if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
  if (v.is_number_float()) {
    std::ostringstream s;
    s.precision(17);
    s << v.get<double>();
    return s.str();
  }
  return v.dump();
}

std::string fmt(double x) {
  std::ostringstream s;
  s.precision(17);
  s << x;
  return s.str();
}

}  // namespace

const char* to_string(ExperimentKind kind) noexcept {
  switch (kind) {
    case ExperimentKind::simulate: return "simulate";
    case ExperimentKind::hydro: return "hydro";
    case ExperimentKind::rate: return "rate";
    case ExperimentKind::lln: return "lln";
    case ExperimentKind::perturbed_lln: return "perturbed-lln";
    case ExperimentKind::entropy: return "entropy";
    case ExperimentKind::importance: return "importance";
    case ExperimentKind::diagnostics: return "diagnostics";
  }
  return "unknown";
}

ExperimentKind parse_experiment_kind(const std::string& text) {
  const auto t = boost::algorithm::trim_copy(text);
  for (auto k : {ExperimentKind::simulate, ExperimentKind::hydro, ExperimentKind::rate, ExperimentKind::lln,
                 ExperimentKind::perturbed_lln, ExperimentKind::entropy, ExperimentKind::importance,
                 ExperimentKind::diagnostics})
    if (t == to_string(k)) return k;
  throw ConfigError("unknown experiment kind '" + text + "'");
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  for (const auto& w : words(text)) out.push_back(to_int(w, "integer list"));
  return out;
}

DensityProfile parse_profile(const std::string& spec) {
  const auto w = words(spec);
  if (w.empty()) throw ConfigError("empty profile specification");
  try {
    if (w[0] == "constant" && w.size() == 2) return DensityProfile::constant(to_number(w[1], "profile"));
    if (w[0] == "cosine" && (w.size() == 3 || w.size() == 4))
      return DensityProfile::cosine(to_number(w[1], "profile"), to_number(w[2], "profile"),
                                    w.size() == 4 ? to_int(w[3], "profile") : 1);
    if (w[0] == "values" && w.size() >= 2) {
      std::vector<double> v;
      for (std::size_t i = 1; i < w.size(); ++i) v.push_back(to_number(w[i], "profile"));
      return DensityProfile::uniform(std::move(v));
    }
    if (w[0] == "knots" && w.size() >= 2) {
      std::vector<std::pair<double, double>> knots;
      for (std::size_t i = 1; i < w.size(); ++i) {
        const auto colon = w[i].find(':');
        if (colon == std::string::npos) throw ConfigError("profile knot '" + w[i] + "' is not x:value");
        knots.emplace_back(to_number(w[i].substr(0, colon), "profile"), to_number(w[i].substr(colon + 1), "profile"));
      }
      return DensityProfile(std::move(knots));
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("profile: ") + e.what());
  }
  throw ConfigError("unrecognised profile specification '" + spec + "'");
}

LocalRate parse_rates(const std::string& spec, const std::filesystem::path& base_dir) {
  const auto w = words(spec);
  if (w.empty()) throw ConfigError("empty rates specification");
  try {
    if (w[0] == "intro" && w.size() == 1) return LocalRate::intro_example();
    if (w[0] == "archetype" && w.size() == 3) return LocalRate::archetype(parse_rational(w[1]), parse_rational(w[2]));
    if (w[0] == "constant" && w.size() == 3) return LocalRate::constant(parse_rational(w[1]), parse_rational(w[2]));
    if (w[0] == "file" && w.size() == 2) {
      std::filesystem::path p = w[1];
      if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
      std::ifstream in(p);
      if (!in) throw ConfigError("rates file '" + p.string() + "' does not exist");
      std::stringstream buf;
      buf << in.rdbuf();
      return LocalRate::parse(buf.str());
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("rates: ") + e.what());
  }
  throw ConfigError("unrecognised rates specification '" + spec + "'");
}

TestFunctionH parse_test_function(const std::string& spec, double horizon) {
  TestFunctionH H(horizon);
  std::vector<std::string> parts;
  boost::algorithm::split(parts, spec, boost::is_any_of(";"));
  for (const auto& part : parts) {
    const auto w = words(part);
    if (w.empty() || (w.size() == 1 && w[0] == "0")) continue;
    if (w.size() != 4 || (w[0] != "cos" && w[0] != "sin"))
      throw ConfigError("test-function term '" + part + "' is not 'cos|sin k degree coef'");
    TestFunctionTerm term;
    term.kind = w[0] == "cos" ? Trig::cosine : Trig::sine;
    term.k = to_int(w[1], "H frequency");
    term.degree = to_int(w[2], "H degree");
    term.coefficient = to_number(w[3], "H coefficient");
    if (term.k < 0 || term.degree < 0) throw ConfigError("H frequency and degree must be non-negative");
    H.add(term);
  }
  return H;
}

TimeFunction parse_time_function(const std::string& spec) {
  const auto w = words(spec);
  if (w.empty()) throw ConfigError("empty time-function specification");
  if (w[0] == "constant" && w.size() == 2) return TimeFunction::constant(to_number(w[1], "a"));
  if (w[0] == "poly" && w.size() >= 2) {
    std::vector<double> c;
    for (std::size_t i = 1; i < w.size(); ++i) c.push_back(to_number(w[i], "a"));
    return TimeFunction::polynomial(std::move(c));
  }
  throw ConfigError("unrecognised time-function specification '" + spec + "'");
}

std::string ExperimentConfig::canonical() const {
  std::ostringstream s;
  s << "kind=" << to_string(kind) << "\n[model]\nn=";
  for (std::size_t i = 0; i < model.sizes.size(); ++i) s << (i ? "," : "") << model.sizes[i];
  s << "\nT=" << fmt(model.horizon) << "\nrates=" << model.rates.serialize() << "u0=" << model.u0_spec
    << "\nD=" << fmt(model.diffusion) << "\n[tilt]\nv0=" << tilt.v0_spec << "\nH=" << tilt.H_spec
    << "\na=" << tilt.a_spec << "\n[run]\nreplicas=" << run.replicas << "\nseed=" << run.seed
    << "\nrecord_points=" << run.record_points << "\nhydro_points=" << run.hydro_points << "\ndiagnostic_eps=";
  for (double e : run.diagnostic_eps) s << fmt(e) << ",";
  s << "\nensemble_max=" << run.ensemble_max << "\n[event]\ndensity_radius=" << fmt(event.density_radius)
    << "\nwalker_radius=" << fmt(event.walker_radius) << "\nnaive_replicas=" << event.naive_replicas
    << "\nnaive_max_n=" << event.naive_max_n
    << "\n[tolerances]\nz=" << fmt(tol.z) << "\natol=" << fmt(tol.atol) << "\nl1_max=" << fmt(tol.l1_max)
    << "\nblock_eps=" << fmt(tol.block_eps) << "\nentropy_gap=" << fmt(tol.entropy_gap)
    << "\nrate_gap=" << fmt(tol.rate_gap) << "\n";
  return s.str();
}

std::uint64_t ExperimentConfig::hash() const { return fnv1a(canonical()); }

void ExperimentConfig::validate() const {
  if (model.sizes.empty()) throw ConfigError("model.n must list at least one lattice size");
  if (!std::is_sorted(model.sizes.begin(), model.sizes.end()) ||
      std::adjacent_find(model.sizes.begin(), model.sizes.end()) != model.sizes.end())
    throw ConfigError("model.n must be strictly ascending");
  for (int n : model.sizes)
    if (n < 2) throw ConfigError("lattice sizes must be at least 2");
  if (!(model.horizon > 0.0)) throw ConfigError("model.T must be positive");
  if (!(model.diffusion > 0.0)) throw ConfigError("model.D must be positive");
  if (run.replicas < 1) throw ConfigError("run.replicas must be at least 1");
  if (run.record_points < 1) throw ConfigError("run.record_points must be at least 1");
  if (run.threads < 1) throw ConfigError("run.threads must be at least 1");
  if (run.hydro_points < 8) throw ConfigError("run.hydro_points must be at least 8");
  if (!(tol.block_eps > 0.0 && tol.block_eps < 0.5)) throw ConfigError("tolerances.block_eps must lie in (0, 1/2)");
  for (double e : run.diagnostic_eps)
    if (!(e > 0.0 && e < 0.5)) throw ConfigError("run.diagnostic_eps entries must lie in (0, 1/2)");
  if (run.ensemble_max < 2 || run.ensemble_max > LocalFunction::kMaxCanonicalSize)
    throw ConfigError("run.ensemble_max out of range");
  if (!(event.density_radius > 0.0) || !(event.walker_radius > 0.0))
    throw ConfigError("event radii must be positive");
  if (event.naive_replicas < 0) throw ConfigError("event.naive_replicas must be non-negative");
}

ExperimentConfig parse_ini_config(const std::string& text, const std::filesystem::path& base_dir) {
  boost::property_tree::ptree tree;
  std::istringstream in(text);
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  Flat flat;
  for (const auto& [section, body] : tree) {
    if (body.empty()) throw ConfigError("config: key '" + section + "' outside a section");
    for (const auto& [key, value] : body) flat[section + "." + key] = value.get_value<std::string>();
  }
  return build(flat, base_dir);
}

ExperimentConfig parse_json_config(const std::string& text, const std::filesystem::path& base_dir) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config: top level must be an object");
  Flat flat;
  for (const auto& [section, body] : doc.items()) {
    if (!body.is_object()) throw ConfigError("config: section '" + section + "' must be an object");
    for (const auto& [key, value] : body.items()) flat[section + "." + key] = json_scalar(value);
  }
  return build(flat, base_dir);
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  const auto dir = path.parent_path();
  if (path.extension() == ".json") return parse_json_config(buf.str(), dir);
  return parse_ini_config(buf.str(), dir);
}

}  // namespace rwdre
