#include "rwdre/ldp.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss.hpp>

#include "rwdre/measures.hpp"

namespace rwdre {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::vector<double> trapezoid_weights(const std::vector<double>& t) {
  std::vector<double> w(t.size(), 0.0);
  for (std::size_t i = 0; i + 1 < t.size(); ++i) {
    const double h = 0.5 * (t[i + 1] - t[i]);
    w[i] += h;
    w[i + 1] += h;
  }
  return w;
}

// Three-point Gauss-Legendre nodes on `cells` uniform cells of [0, 1).
struct SpatialQuadrature {
  std::vector<double> x;
  std::vector<double> w;

  explicit SpatialQuadrature(int cells) {
    static constexpr std::array<double, 3> node = {-0.7745966692414834, 0.0, 0.7745966692414834};
    static constexpr std::array<double, 3> weight = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
    const double h = 1.0 / cells;
    x.reserve(3 * static_cast<std::size_t>(cells));
    w.reserve(x.capacity());
    for (int i = 0; i < cells; ++i)
      for (int q = 0; q < 3; ++q) {
        x.push_back(h * (i + 0.5 * (1.0 + node[q])));
        w.push_back(0.5 * h * weight[q]);
      }
  }
};

int quadrature_cells(const PathField& pi) {
  const auto& f = pi.base_frame(0);
  if (f.is_uniform() && f.knot_count() >= 64 && pi.shift(0) == 0.0 && f.knot_count() <= 4096)
    return static_cast<int>(f.knot_count());
  return 256;
}

double moment(const DensityProfile& f, Trig kind, int k) {
  const auto [c, s] = f.fourier_moment(k);
  return kind == Trig::cosine ? c : s;
}

}  // namespace

DensityAt density_of(const HydroSolution& sol) {
  return [&sol](double t, double x) { return sol.density_at(t, x); };
}

DensityAt density_of(const PathField& field) {
  return [&field](double t, double x) { return field.value_at(t, x); };
}

DensityAt constant_density(double rho) {
  return [rho](double, double) { return rho; };
}

double entropy_h(const DensityProfile& pi0, const DensityProfile& u0) {
  using Gauss = boost::math::quadrature::gauss<double, 7>;
  std::vector<double> cuts = pi0.breakpoints(0.0, 1.0);
  const auto more = u0.breakpoints(0.0, 1.0);
  cuts.insert(cuts.end(), more.begin(), more.end());
  cuts.push_back(0.0);
  cuts.push_back(1.0);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = cuts[i], b = cuts[i + 1];
    if (b - a <= 0.0) continue;
    total += Gauss::integrate([&](double x) { return bernoulli_kl(pi0(x), u0(x)); }, a, b);
    if (!std::isfinite(total)) return kInfinity;
  }
  return total;
}

double J_functional(const TestFunctionH& H, const PathField& pi, double diffusion) {
  if (pi.size() < 2) throw std::invalid_argument("J_functional: path needs at least two frames");
  const auto& times = pi.times();
  const double T = H.horizon();
  const auto w = trapezoid_weights(times);
  const SpatialQuadrature quad(quadrature_cells(pi));
  const auto& terms = H.terms();

  auto pairing = [&](const DensityProfile& f, double t, bool generator) {
    const double tau = 2.0 * t / T - 1.0;
    double acc = 0.0;
    for (const auto& term : terms) {
      const double m = term.k == 0 ? (term.kind == Trig::cosine ? f.mass() : 0.0) : moment(f, term.kind, term.k);
      double factor;
      if (generator) {
        const double lap = -(kTwoPi * term.k) * (kTwoPi * term.k);
        factor = (2.0 / T) * chebyshev_derivative(term.degree, tau) + diffusion * lap * chebyshev(term.degree, tau);
      } else {
        factor = chebyshev(term.degree, tau);
      }
      acc += term.coefficient * factor * m;
    }
    return acc;
  };

  const std::size_t last = pi.size() - 1;
  double value = pairing(pi.frame(last), times[last], false) - pairing(pi.frame(0), times[0], false);
  for (std::size_t m = 0; m <= last; ++m) {
    const auto f = pi.frame(m);
    double quadratic = 0.0;
    for (std::size_t q = 0; q < quad.x.size(); ++q) {
      const double rho = f(quad.x[q]);
      const double g = H.dx(times[m], quad.x[q]);
      quadratic += quad.w[q] * g * g * rho * (1.0 - rho);
    }
    value -= w[m] * (pairing(f, times[m], true) + diffusion * quadratic);
  }
  return value;
}

QuadraticForm assemble_J(const PathField& pi, double horizon, const IexOptions& options) {
  if (pi.size() < 2) throw std::invalid_argument("I_ex: path needs at least two frames");
  const int K = options.basis.max_mode;
  const int P = options.basis.max_degree + 1;
  const int S = 2 * K;
  const auto N = static_cast<std::size_t>(S * P);
  const double D = options.diffusion;
  const double T = horizon;

  QuadraticForm form;
  form.basis.reserve(N);
  for (int s = 0; s < S; ++s)
    for (int j = 0; j < P; ++j)
      form.basis.push_back({s % 2 == 0 ? Trig::cosine : Trig::sine, s / 2 + 1, j, 0.0});
  form.b.assign(N, 0.0);
  form.A.assign(N * N, 0.0);

  const auto& times = pi.times();
  const auto w = trapezoid_weights(times);
  const SpatialQuadrature quad(quadrature_cells(pi));
  const std::size_t Q = quad.x.size();

  // Spatial derivatives of the modes at the quadrature nodes.
  Eigen::MatrixXd dmode(Q, S);
  for (int s = 0; s < S; ++s) {
    const int k = s / 2 + 1;
    for (std::size_t q = 0; q < Q; ++q) {
      const double phase = kTwoPi * k * quad.x[q];
      dmode(static_cast<Eigen::Index>(q), s) =
          kTwoPi * k * (s % 2 == 0 ? -std::sin(phase) : std::cos(phase));
    }
  }

  auto mode_moments = [&](const DensityProfile& f) {
    std::vector<double> out(static_cast<std::size_t>(S));
    for (int k = 1; k <= K; ++k) {
      const auto [c, sn] = f.fourier_moment(k);
      out[static_cast<std::size_t>(2 * (k - 1))] = c;
      out[static_cast<std::size_t>(2 * (k - 1) + 1)] = sn;
    }
    return out;
  };

  const std::size_t last = pi.size() - 1;
  {
    const auto end = mode_moments(pi.frame(last));
    const auto start = mode_moments(pi.frame(0));
    for (int s = 0; s < S; ++s)
      for (int j = 0; j < P; ++j)
        form.b[static_cast<std::size_t>(s * P + j)] +=
            chebyshev(j, 1.0) * end[static_cast<std::size_t>(s)] - chebyshev(j, -1.0) * start[static_cast<std::size_t>(s)];
  }

  Eigen::MatrixXd weighted(Q, S);
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(N));
  std::vector<double> cheb(static_cast<std::size_t>(P)), dcheb(static_cast<std::size_t>(P));
  for (std::size_t m = 0; m <= last; ++m) {
    const auto f = pi.frame(m);
    const double tau = std::clamp(2.0 * times[m] / T - 1.0, -1.0, 1.0);
    for (int j = 0; j < P; ++j) {
      cheb[static_cast<std::size_t>(j)] = chebyshev(j, tau);
      dcheb[static_cast<std::size_t>(j)] = chebyshev_derivative(j, tau) * 2.0 / T;
    }
    const auto mom = mode_moments(f);
    for (int s = 0; s < S; ++s) {
      const int k = s / 2 + 1;
      const double lap = -(kTwoPi * k) * (kTwoPi * k);
      for (int j = 0; j < P; ++j)
        form.b[static_cast<std::size_t>(s * P + j)] -=
            w[m] * (dcheb[static_cast<std::size_t>(j)] + D * lap * cheb[static_cast<std::size_t>(j)]) *
            mom[static_cast<std::size_t>(s)];
    }
    for (std::size_t q = 0; q < Q; ++q) {
      const double rho = f(quad.x[q]);
      weighted.row(static_cast<Eigen::Index>(q)) =
          dmode.row(static_cast<Eigen::Index>(q)) * (quad.w[q] * rho * (1.0 - rho));
    }
    const Eigen::MatrixXd G = dmode.transpose() * weighted;  // S x S
    for (int s1 = 0; s1 < S; ++s1)
      for (int s2 = 0; s2 < S; ++s2) {
        const double g = D * w[m] * G(s1, s2);
        if (g == 0.0) continue;
        for (int j1 = 0; j1 < P; ++j1)
          for (int j2 = 0; j2 < P; ++j2)
            A(s1 * P + j1, s2 * P + j2) += g * cheb[static_cast<std::size_t>(j1)] * cheb[static_cast<std::size_t>(j2)];
      }
  }
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j)
      form.A[i * N + j] = 0.5 * (A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) +
                                 A(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)));
  return form;
}

IexResult I_ex(const PathField& pi, const DensityProfile& u0, const IexOptions& options) {
  const double T = pi.horizon();
  if (!(T > 0.0)) throw std::invalid_argument("I_ex: horizon must be positive");
  IexResult result;
  result.entropy = entropy_h(pi.frame(0), u0);

  const auto form = assemble_J(pi, T, options);
  const auto N = static_cast<Eigen::Index>(form.b.size());
  const Eigen::Map<const Eigen::MatrixXd> A(form.A.data(), N, N);
  const Eigen::Map<const Eigen::VectorXd> b(form.b.data(), N);

  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(A);
  if (eig.info() != Eigen::Success) throw std::runtime_error("I_ex: eigen decomposition failed");
  const auto& lambda = eig.eigenvalues();
  result.min_eigenvalue = lambda.minCoeff();
  result.max_eigenvalue = lambda.maxCoeff();
  const double scale = std::max(std::abs(result.min_eigenvalue), std::abs(result.max_eigenvalue));
  if (result.min_eigenvalue < -options.indefinite_tolerance * scale) {
    std::ostringstream msg;
    msg << "I_ex: quadratic form is indefinite (min eigenvalue " << result.min_eigenvalue << ", max "
        << result.max_eigenvalue << ")";
    throw IndefiniteFormError(msg.str());
  }

  const Eigen::VectorXd proj = eig.eigenvectors().transpose() * b;
  const double cut = options.null_tolerance * scale;
  const double null_tol = 1e-9 * std::max(1.0, b.norm());
  double null_mass = 0.0, sup = 0.0;
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(N);
  for (Eigen::Index i = 0; i < N; ++i) {
    if (lambda(i) > cut && scale > 0.0) {
      ++result.rank;
      sup += proj(i) * proj(i) / lambda(i);
      theta += eig.eigenvectors().col(i) * (0.5 * proj(i) / lambda(i));
    } else {
      null_mass += proj(i) * proj(i);
    }
  }
  if (std::sqrt(null_mass) > null_tol) {
    result.sup_J = kInfinity;
  } else {
    result.sup_J = 0.25 * sup;
  }
  result.value = result.entropy + result.sup_J;

  result.theta.assign(theta.data(), theta.data() + N);
  std::vector<TestFunctionTerm> terms = form.basis;
  for (std::size_t i = 0; i < terms.size(); ++i) terms[i].coefficient = result.theta[i];
  result.optimizer = TestFunctionH(T, std::move(terms));
  return result;
}

double legendre_objective(double a, double xp, double vp, double vm) noexcept {
  return a * xp - vp * std::expm1(a) - vm * std::expm1(-a);
}

double a_star_plus_form(double xp, double vp, double vm) noexcept {
  return std::log((xp + std::sqrt(xp * xp + 4.0 * vp * vm)) / (2.0 * vp));
}

double a_star_minus_form(double xp, double vp, double vm) noexcept {
  return -std::log((-xp + std::sqrt(xp * xp + 4.0 * vp * vm)) / (2.0 * vm));
}

double a_star(double xp, double vp, double vm, double tol_zero) noexcept {
  const bool has_plus = vp > tol_zero;
  const bool has_minus = vm > tol_zero;
  if (has_plus && has_minus)
    return xp >= 0.0 ? a_star_plus_form(xp, vp, vm) : a_star_minus_form(xp, vp, vm);
  if (has_plus) {
    if (xp > 0.0) return std::log(xp / vp);
    return -kInfinity;  // finite cost only when x' = 0
  }
  if (has_minus) {
    if (xp < 0.0) return -std::log(-xp / vm);
    return kInfinity;
  }
  if (xp == 0.0) return 0.0;
  return xp > 0.0 ? kInfinity : -kInfinity;
}

double pointwise_cost(double xp, double vp, double vm, double tol_zero) noexcept {
  const bool has_plus = vp > tol_zero;
  const bool has_minus = vm > tol_zero;
  if (has_plus && has_minus) {
    const double root = std::sqrt(xp * xp + 4.0 * vp * vm);
    const double a = xp >= 0.0 ? a_star_plus_form(xp, vp, vm) : a_star_minus_form(xp, vp, vm);
    return a * xp - root + vp + vm;
  }
  if (has_plus) {
    if (xp > 0.0) return xp * std::log(xp / vp) - xp + vp;
    return xp == 0.0 ? vp : kInfinity;
  }
  if (has_minus) {
    if (xp < 0.0) return -xp * std::log(-xp / vm) + xp + vm;
    return xp == 0.0 ? vm : kInfinity;
  }
  return xp == 0.0 ? 0.0 : kInfinity;
}

WalkerPath WalkerPath::from_function(const std::function<double(double)>& x, double horizon, int intervals) {
  WalkerPath p;
  p.times.reserve(static_cast<std::size_t>(intervals) + 1);
  for (int i = 0; i <= intervals; ++i) {
    const double t = horizon * i / intervals;
    p.times.push_back(t);
    p.positions.push_back(x(t));
  }
  return p;
}

WalkerPath WalkerPath::from_samples(std::vector<double> times, std::vector<double> positions) {
  if (times.size() != positions.size() || times.size() < 2)
    throw std::invalid_argument("WalkerPath: need at least two matching samples");
  for (std::size_t i = 1; i < times.size(); ++i)
    if (!(times[i] > times[i - 1])) throw std::invalid_argument("WalkerPath: times must increase");
  return {std::move(times), std::move(positions)};
}

WalkerPath WalkerPath::mollified(const WalkerPath& raw, double bandwidth) {
  if (!(bandwidth > 0.0)) return raw;
  WalkerPath out{raw.times, std::vector<double>(raw.positions.size())};
  for (std::size_t i = 0; i < raw.times.size(); ++i) {
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < raw.times.size(); ++j) {
      const double d = (raw.times[j] - raw.times[i]) / bandwidth;
      if (std::abs(d) > 6.0) continue;
      const double w = std::exp(-0.5 * d * d);
      num += w * raw.positions[j];
      den += w;
    }
    out.positions[i] = num / den;
  }
  const double origin = out.positions.front();
  for (double& x : out.positions) x -= origin;
  return out;
}

std::vector<double> WalkerPath::derivative() const {
  const std::size_t m = times.size();
  std::vector<double> d(m, 0.0);
  if (m < 2) return d;
  d[0] = (positions[1] - positions[0]) / (times[1] - times[0]);
  d[m - 1] = (positions[m - 1] - positions[m - 2]) / (times[m - 1] - times[m - 2]);
  for (std::size_t i = 1; i + 1 < m; ++i)
    d[i] = (positions[i + 1] - positions[i - 1]) / (times[i + 1] - times[i - 1]);
  return d;
}

double WalkerPath::max_increment() const {
  double out = 0.0;
  for (std::size_t i = 1; i < positions.size(); ++i) out = std::max(out, std::abs(positions[i] - positions[i - 1]));
  return out;
}

IrwResult I_rw(const WalkerPath& x, const DensityAt& pi, const LocalRate& c, const IrwOptions& options) {
  IrwResult r;
  const std::size_t m = x.times.size();
  if (m < 2) throw std::invalid_argument("I_rw: path needs at least two samples");
  double max_dt = 0.0;
  for (std::size_t i = 1; i < m; ++i) max_dt = std::max(max_dt, x.times[i] - x.times[i - 1]);
  const double threshold = options.atom_threshold > 0.0 ? options.atom_threshold : std::sqrt(max_dt);
  r.absolutely_continuous = x.max_increment() <= threshold;

  r.velocity = x.derivative();
  r.density.resize(m);
  r.a_samples.resize(m);
  std::vector<double> cost(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double xp = r.velocity[i];
    if (!std::isfinite(xp)) r.finite1 = false;
    const double rho = std::clamp(pi(x.times[i], x.positions[i]), 0.0, 1.0);
    r.density[i] = rho;
    const auto v = mean_field_velocity(c, rho);
    if (xp > options.tol_zero && v.plus <= options.tol_zero) r.finite2 = false;
    if (xp < -options.tol_zero && v.minus <= options.tol_zero) r.finite3 = false;
    r.a_samples[i] = a_star(xp, v.plus, v.minus, options.tol_zero);
    cost[i] = pointwise_cost(xp, v.plus, v.minus, options.tol_zero);
  }
  if (!r.finite()) {
    r.value = kInfinity;
    return r;
  }
  const auto w = trapezoid_weights(x.times);
  for (std::size_t i = 0; i < m; ++i) r.value += w[i] * cost[i];
  if (!std::isfinite(r.value)) r.value = kInfinity;
  return r;
}

double j_functional(const std::vector<double>& a_nodes, const DensityAt& pi, const WalkerPath& x,
                    const LocalRate& c) {
  const std::size_t m = x.times.size();
  if (a_nodes.size() != m) throw std::invalid_argument("j_functional: one control value per path sample");
  const auto xp = x.derivative();
  const auto w = trapezoid_weights(x.times);
  double total = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double a = a_nodes[i];
    if (!std::isfinite(a)) throw std::invalid_argument("j_functional: control must be finite");
    const double rho = std::clamp(pi(x.times[i], x.positions[i]), 0.0, 1.0);
    const auto v = mean_field_velocity(c, rho);
    total += w[i] * legendre_objective(a, xp[i], v.plus, v.minus);
  }
  return total;
}

double j_functional(const TimeFunction& a, const DensityAt& pi, const WalkerPath& x, const LocalRate& c) {
  std::vector<double> nodes(x.times.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) nodes[i] = a(x.times[i]);
  return j_functional(nodes, pi, x, c);
}

ContractResult contract_rate(const WalkerPath& x, const LocalRate& c, const DensityProfile& u0,
                             const ContractOptions& options) {
  ContractResult out;
  const double T = x.times.back();
  IexOptions iex = options.iex;
  iex.diffusion = options.grid.diffusion;

  auto consider = [&](std::string label, const DensityAt& density, const PathField& field) {
    ContractCandidate cand;
    cand.label = std::move(label);
    cand.Irw = I_rw(x, density, c, options.irw).value;
    if (std::isfinite(cand.Irw)) {
      cand.Iex = I_ex(field, u0, iex).value;
      cand.total = cand.Irw + cand.Iex;
    }
    out.candidates.push_back(std::move(cand));
  };

  if (options.include_null) {
    const auto sol = solve_perturbed(u0, TiltParams{}, c, T, options.grid);
    consider("null", density_of(sol.u), sol.u);
  }
  std::vector<double> densities = options.densities;
  if (densities.empty())
    for (int i = 1; i <= 19; ++i) densities.push_back(0.05 * i);
  for (double rho : densities) {
    const auto times = uniform_times(T, 8);
    PathField field(times, std::vector<DensityProfile>(times.size(), DensityProfile::constant(rho)));
    std::ostringstream label;
    label << "constant " << rho;
    consider(label.str(), constant_density(rho), field);
  }
  for (std::size_t i = 0; i < options.controls.size(); ++i) {
    TiltParams tilt;
    tilt.H = options.controls[i];
    const auto sol = solve_perturbed(u0, tilt, c, T, options.grid);
    consider("control " + std::to_string(i), density_of(sol.u), sol.u);
  }

  for (std::size_t i = 0; i < out.candidates.size(); ++i)
    if (out.candidates[i].total < out.value) {
      out.value = out.candidates[i].total;
      out.best = i;
    }
  out.feasible = std::isfinite(out.value);
  out.message = out.feasible ? "upper bound over " + std::to_string(out.candidates.size()) + " candidate densities"
                             : "no candidate density makes the walker path feasible";
  return out;
}

double young_phi(double x) noexcept { return x * std::log1p(x); }

double young_phi_conjugate(double y) {
  if (!(y > 0.0)) return 0.0;
  if (y > 700.0) return kInfinity;
  // Maximiser x solves log(1 + x) + x / (1 + x) = y; in s = log(1 + x) the
  // map s + 1 - e^{-s} is increasing and concave, so Newton is monotone
  // after the first step.
  double s = y < 1.0 ? 0.5 * y : y - 1.0;
  for (int it = 0; it < 100; ++it) {
    const double e = std::exp(-s);
    const double g = s + 1.0 - e - y;
    const double step = g / (1.0 + e);
    s -= step;
    if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(s))) break;
  }
  const double x = std::expm1(s);
  return x * (y - s);
}

double luxemburg_norm(const std::vector<double>& times, const std::vector<double>& values, YoungFunction which,
                      double tolerance) {
  if (times.size() != values.size() || times.size() < 2)
    throw std::invalid_argument("luxemburg_norm: need matching samples");
  const auto w = trapezoid_weights(times);
  double peak = 0.0;
  for (double v : values) peak = std::max(peak, std::abs(v));
  if (peak == 0.0) return 0.0;
  auto modular = [&](double lambda) {
    double total = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double z = std::abs(values[i]) / lambda;
      total += w[i] * (which == YoungFunction::phi ? young_phi(z) : young_phi_conjugate(z));
    }
    return total;
  };
  double hi = peak, lo = peak;
  while (modular(hi) > 1.0) hi *= 2.0;
  while (modular(lo) <= 1.0) {
    lo *= 0.5;
    if (lo < 1e-300) return 0.0;
  }
  while (hi - lo > tolerance * hi) {
    const double mid = 0.5 * (lo + hi);
    (modular(mid) > 1.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace rwdre
