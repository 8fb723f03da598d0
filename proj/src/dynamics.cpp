#include "rwdre/dynamics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <sstream>

namespace rwdre {
namespace {

constexpr double kGauss2 = 0.57735026918962576451;
constexpr std::array<double, 2> kGauss4Node{0.33998104358485626480, 0.86113631159405257522};
constexpr std::array<double, 2> kGauss4Weight{0.65214515486254614263, 0.34785484513745385737};
constexpr double kTwo32 = 4294967296.0;
constexpr int kMaxDepth = 40;

template <std::size_t N>
using Vec = std::array<double, N>;

// Adaptive Gauss-Legendre: order 4 value, |GL4 - GL2| error indicator.
template <std::size_t N, class F>
void integrate_adaptive(const F& f, double a, double b, double tol, int depth, Vec<N>& acc, double& err) {
  const double mid = 0.5 * (a + b), h = 0.5 * (b - a);
  Vec<N> g4{}, g2{};
  for (int k = 0; k < 2; ++k)
    for (double sgn : {-1.0, 1.0}) {
      const Vec<N> v = f(mid + sgn * h * kGauss4Node[k]);
      for (std::size_t i = 0; i < N; ++i) g4[i] += h * kGauss4Weight[k] * v[i];
    }
  for (double sgn : {-1.0, 1.0}) {
    const Vec<N> v = f(mid + sgn * h * kGauss2);
    for (std::size_t i = 0; i < N; ++i) g2[i] += h * v[i];
  }
  double diff = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    diff = std::max(diff, std::abs(g4[i] - g2[i]));
    scale = std::max(scale, std::abs(g4[i]));
  }
  const double allowed = tol * (b - a) * std::max(1.0, scale / (b - a));
  if (diff <= allowed) {
    for (std::size_t i = 0; i < N; ++i) acc[i] += g4[i];
    err += diff;
    return;
  }
  if (depth >= kMaxDepth) {
    std::ostringstream msg;
    msg << "quadrature tolerance " << tol << " not met on [" << a << ", " << b << "]";
    throw QuadratureError(msg.str());
  }
  integrate_adaptive<N>(f, a, mid, tol, depth + 1, acc, err);
  integrate_adaptive<N>(f, mid, b, tol, depth + 1, acc, err);
}

// Composite pieces no longer than max_piece, each refined adaptively.
template <std::size_t N, class F>
Vec<N> integrate(const F& f, double a, double b, double max_piece, double tol, double& err) {
  Vec<N> acc{};
  if (!(b > a)) return acc;
  const int pieces = std::max(1, static_cast<int>(std::ceil((b - a) / max_piece)));
  const double w = (b - a) / pieces;
  for (int p = 0; p < pieces; ++p) {
    const double lo = a + p * w;
    const double hi = p + 1 == pieces ? b : lo + w;
    integrate_adaptive<N>(f, lo, hi, tol, 0, acc, err);
  }
  return acc;
}

// psi-type integrands of the compensators: e^x - 1 and x e^x - e^x + 1.
inline Vec<2> exp_pair(double x) {
  const double e = std::exp(x);
  return {std::expm1(x), x * e - e + 1.0};
}

std::uint64_t probability_threshold(double p) {
  if (!(p > 0.0)) return 0;
  if (p >= 1.0) return std::uint64_t{1} << 32;
  return static_cast<std::uint64_t>(std::ceil(p * kTwo32));
}

class Engine {
 public:
  Engine(const TorusLattice& lattice, const LocalRate& c, const InitialState& init, const TiltParams* tilt,
         const SimulationOptions& options, Stream& rng)
      : lattice_(lattice), c_(c), tilt_(tilt), opt_(options), rng_(rng),
        n_(lattice.size()), nb_(lattice.bond_count()), eta_(init.eta) {
    if (eta_.size() != n_) throw std::invalid_argument("simulate: configuration size differs from lattice");
    if (!(opt_.horizon > 0.0)) throw std::invalid_argument("simulate: horizon must be positive");
    if (!(opt_.diffusion > 0.0)) throw std::invalid_argument("simulate: diffusion must be positive");
    if (!std::is_sorted(opt_.record_times.begin(), opt_.record_times.end()))
      throw std::invalid_argument("simulate: record times must be increasing");
    for (double t : opt_.record_times)
      if (t < 0.0 || t > opt_.horizon) throw std::invalid_argument("simulate: record time outside [0, T]");

    env_tilt_ = tilt_ && tilt_->has_environment_tilt();
    walk_tilt_ = tilt_ && tilt_->has_walker_tilt();
    tilted_law_ = opt_.law == Law::tilted && tilt_ != nullptr;
    exchange_rate_ = opt_.diffusion * static_cast<double>(n_) * n_;

    if (env_tilt_) setup_environment_tilt();
    if (walk_tilt_) {
      const auto& a = *tilt_->a;
      a_bound_ = a.is_constant() ? std::abs(a.constant_value()) : a.sup_abs();
    }
    const double env_factor = tilted_law_ && env_tilt_ ? std::exp(b_bound_) : 1.0;
    const double walk_factor = tilted_law_ && walk_tilt_ ? std::exp(a_bound_) : 1.0;
    w_exchange_ = exchange_rate_ * env_factor;
    w_plus_ = n_ * c_.max_plus() * walk_factor;
    w_minus_ = n_ * c_.max_minus() * walk_factor;
    total_rate_ = nb_ * w_exchange_ + w_plus_ + w_minus_;

    result_.trajectory.n = n_;
    result_.trajectory.horizon = opt_.horizon;
    result_.trajectory.initial = init.eta;
    result_.trajectory.has_events = opt_.record_events;
    if (tilt_) {
      result_.accumulators.log_init = init.log_density / n_;
      result_.accumulators.entropy_init = init.entropy_per_site;
    }
  }

  SimulationResult run() {
    const bool homogeneous = !tilted_law_ || tilt_->time_homogeneous();
    const bool fast = !opt_.force_exact && !opt_.record_events && !opt_.accumulate && homogeneous;
    if (fast) {
      run_uniformised();
    } else {
      run_exact();
    }
    result_.exact_engine = !fast;
    auto& tr = result_.trajectory;
    tr.final_state = eta_;
    tr.plus_count = plus_;
    tr.minus_count = minus_;
    tr.exchange_count = exchanges_;
    return std::move(result_);
  }

 private:
  void setup_environment_tilt() {
    const auto& H = *tilt_->H;
    const auto proj = H.site_projections(n_);
    bond_diff_.assign(proj.size(), std::vector<double>(static_cast<std::size_t>(nb_)));
    for (std::size_t m = 0; m < proj.size(); ++m)
      for (int b = 0; b < nb_; ++b)
        bond_diff_[m][static_cast<std::size_t>(b)] = proj[m][static_cast<std::size_t>(right(b))] -
                                                      proj[m][static_cast<std::size_t>(b)];
    static_env_ = H.time_independent();
    if (static_env_) {
      static_diff_.assign(static_cast<std::size_t>(nb_), 0.0);
      for (std::size_t m = 0; m < proj.size(); ++m)
        for (int b = 0; b < nb_; ++b)
          static_diff_[static_cast<std::size_t>(b)] += H.terms()[m].coefficient * bond_diff_[m][static_cast<std::size_t>(b)];
      b_bound_ = 0.0;
      for (double d : static_diff_) b_bound_ = std::max(b_bound_, std::abs(d));
    } else {
      b_bound_ = 0.0;
      for (std::size_t m = 0; m < proj.size(); ++m) {
        double mx = 0.0;
        for (double d : bond_diff_[m]) mx = std::max(mx, std::abs(d));
        b_bound_ += std::abs(H.terms()[m].coefficient) * mx;
      }
    }
  }

  int right(int b) const noexcept { return b + 1 == n_ ? 0 : b + 1; }
  int walker_site() const noexcept { return lattice_.wrap(plus_ - minus_); }

  // h_{b+1} - h_b at time t.
  double bond_difference(int b, double t) {
    if (static_env_) return static_diff_[static_cast<std::size_t>(b)];
    tilt_->H->time_coefficients(t, coef_);
    double d = 0.0;
    for (std::size_t m = 0; m < coef_.size(); ++m) d += coef_[m] * bond_diff_[m][static_cast<std::size_t>(b)];
    return d;
  }

  double a_at(double t) const { return walk_tilt_ ? (*tilt_->a)(t) : 0.0; }

  void snapshot(double t) {
    result_.snapshots.push_back(Snapshot{t, eta_, plus_ - minus_, plus_, minus_});
  }

  void log_event(double t, EventKind kind, int site) {
    if (opt_.record_events) result_.trajectory.events.push_back(Event{t, kind, static_cast<std::int32_t>(site)});
  }

  // ---------------------------------------------------------------- fast path
  void run_uniformised() {
    auto occ = eta_.occupancy_mut();
    const std::uint64_t lim_exchange = std::min<std::uint64_t>(
        std::uint64_t{1} << 32, static_cast<std::uint64_t>(nb_ * w_exchange_ / total_rate_ * kTwo32));
    const std::uint64_t lim_plus = std::min<std::uint64_t>(
        std::uint64_t{1} << 32, lim_exchange + static_cast<std::uint64_t>(w_plus_ / total_rate_ * kTwo32));

    std::vector<std::uint64_t> thr_right, thr_left;
    const bool env = tilted_law_ && env_tilt_;
    if (env) {
      thr_right.resize(static_cast<std::size_t>(nb_));
      thr_left.resize(static_cast<std::size_t>(nb_));
      for (int b = 0; b < nb_; ++b) {
        const double d = static_diff_[static_cast<std::size_t>(b)];
        thr_right[static_cast<std::size_t>(b)] = probability_threshold(std::exp(d - b_bound_));
        thr_left[static_cast<std::size_t>(b)] = probability_threshold(std::exp(-d - b_bound_));
      }
    }
    const double a = tilted_law_ && walk_tilt_ ? tilt_->a->constant_value() : 0.0;
    std::vector<std::uint64_t> thr_plus(c_.window_count()), thr_minus(c_.window_count());
    for (unsigned i = 0; i < c_.window_count(); ++i) {
      const auto r = c_.at_index(i);
      thr_plus[i] = w_plus_ > 0.0 ? probability_threshold(n_ * r.plus * std::exp(a) / w_plus_) : 0;
      thr_minus[i] = w_minus_ > 0.0 ? probability_threshold(n_ * r.minus * std::exp(-a) / w_minus_) : 0;
    }

    auto advance = [&](std::int64_t candidates) {
      for (std::int64_t k = 0; k < candidates; ++k) {
        const std::uint64_t u = rng_.next_u64();
        const std::uint64_t hi = u >> 32;
        if (hi < lim_exchange) {
          const int y = static_cast<int>(((u & 0xffffffffull) * static_cast<std::uint64_t>(nb_)) >> 32);
          const int z = right(y);
          const auto oy = occ[static_cast<std::size_t>(y)];
          if (oy == occ[static_cast<std::size_t>(z)]) continue;
          if (env) {
            const std::uint64_t thr = oy ? thr_right[static_cast<std::size_t>(y)] : thr_left[static_cast<std::size_t>(y)];
            if (std::uint64_t{rng_()} >= thr) continue;
          }
          occ[static_cast<std::size_t>(y)] = occ[static_cast<std::size_t>(z)];
          occ[static_cast<std::size_t>(z)] = oy;
          ++exchanges_;
        } else if (hi < lim_plus) {
          const unsigned idx = c_.window_index(eta_, walker_site());
          if (std::uint64_t{rng_()} < thr_plus[idx]) ++plus_;
        } else {
          const unsigned idx = c_.window_index(eta_, walker_site());
          if (std::uint64_t{rng_()} < thr_minus[idx]) ++minus_;
        }
      }
    };

    double t = 0.0;
    for (double r : opt_.record_times) {
      if (r > t) {
        std::poisson_distribution<std::int64_t> count(total_rate_ * (r - t));
        advance(count(rng_));
        t = r;
      }
      snapshot(r);
    }
    if (opt_.horizon > t) {
      std::poisson_distribution<std::int64_t> count(total_rate_ * (opt_.horizon - t));
      advance(count(rng_));
    }
  }

  // ------------------------------------------------------------- exact path
  void init_accumulators() {
    accumulate_env_ = opt_.accumulate && env_tilt_;
    accumulate_walk_ = opt_.accumulate && walk_tilt_;
    max_piece_ = opt_.horizon / 64.0;
    if (accumulate_env_) {
      status_.assign(static_cast<std::size_t>(nb_), 0);
      since_.assign(static_cast<std::size_t>(nb_), 0.0);
      for (int b = 0; b < nb_; ++b) status_[static_cast<std::size_t>(b)] = bond_status(b);
      if (static_env_) {
        for (int s = 0; s < 2; ++s) {
          static_comp_[s].resize(static_cast<std::size_t>(nb_));
          for (int b = 0; b < nb_; ++b)
            static_comp_[s][static_cast<std::size_t>(b)] =
                exp_pair((s == 0 ? 1.0 : -1.0) * static_diff_[static_cast<std::size_t>(b)]);
        }
      }
    }
    if (accumulate_walk_) {
      walker_idx_ = c_.window_index(eta_, walker_site());
      walker_since_ = 0.0;
    }
  }

  // +1: particle at b, hole at b+1; -1: the reverse; 0: no move possible.
  int bond_status(int b) const noexcept {
    const auto y = eta_[b], z = eta_[right(b)];
    return y == z ? 0 : (y ? 1 : -1);
  }

  void flush_bond(int b, double t) {
    const auto bi = static_cast<std::size_t>(b);
    const int s = status_[bi];
    const double t0 = since_[bi];
    since_[bi] = t;
    if (s == 0 || !(t > t0)) return;
    if (static_env_) {
      const auto& v = static_comp_[s > 0 ? 0 : 1][bi];
      comp_env_ += (t - t0) * v[0];
      ent_env_ += (t - t0) * v[1];
      return;
    }
    const auto v = integrate<2>([&](double u) { return exp_pair(s * bond_difference(b, u)); }, t0, t,
                                max_piece_, opt_.quadrature_tolerance, quad_err_);
    comp_env_ += v[0];
    ent_env_ += v[1];
  }

  void flush_walker(double t) {
    const double t0 = walker_since_;
    walker_since_ = t;
    if (!(t > t0)) return;
    const auto r = c_.at_index(walker_idx_);
    if (tilt_->a->is_constant()) {
      const double a = tilt_->a->constant_value();
      const auto p = exp_pair(a), m = exp_pair(-a);
      comp_walk_ += (t - t0) * (r.plus * p[0] + r.minus * m[0]);
      ent_walk_ += (t - t0) * (r.plus * p[1] + r.minus * m[1]);
      return;
    }
    const auto v = integrate<2>(
        [&](double u) {
          const double a = (*tilt_->a)(u);
          const auto p = exp_pair(a), m = exp_pair(-a);
          return Vec<2>{r.plus * p[0] + r.minus * m[0], r.plus * p[1] + r.minus * m[1]};
        },
        t0, t, max_piece_, opt_.quadrature_tolerance, quad_err_);
    comp_walk_ += v[0];
    ent_walk_ += v[1];
  }

  void run_exact() {
    init_accumulators();
    auto occ = eta_.occupancy_mut();
    std::size_t next_record = 0;
    const auto& records = opt_.record_times;
    const double T = opt_.horizon;
    const double p_exchange = nb_ * w_exchange_ / total_rate_;
    const double p_plus = p_exchange + w_plus_ / total_rate_;
    const bool env_thin = tilted_law_ && env_tilt_;
    const bool walk_thin = tilted_law_ && walk_tilt_;
    double t = 0.0;
    std::array<int, 3> touched{};

    while (true) {
      t += rng_.exponential(total_rate_);
      while (next_record < records.size() && records[next_record] < t) snapshot(records[next_record++]);
      if (t > T) break;
      const double u = rng_.uniform();
      if (u < p_exchange) {
        const int y = std::min(nb_ - 1, static_cast<int>(u / p_exchange * nb_));
        const int z = right(y);
        const auto oy = occ[static_cast<std::size_t>(y)];
        if (oy == occ[static_cast<std::size_t>(z)]) continue;
        const int s = oy ? 1 : -1;
        double delta = 0.0;
        if (env_tilt_) delta = s * bond_difference(y, t);
        if (env_thin) {
          if (delta > b_bound_ + 1e-9) throw RateBoundViolation("exchange rate exceeds its thinning bound");
          if (!rng_.bernoulli(std::exp(delta - b_bound_))) continue;
        }
        int count = 0;
        if (accumulate_env_) {
          for (int b : {y - 1, y, y + 1}) {
            const int bb = nb_ == 1 ? 0 : lattice_.wrap(b);
            if (std::find(touched.begin(), touched.begin() + count, bb) == touched.begin() + count)
              touched[static_cast<std::size_t>(count++)] = bb;
          }
          for (int i = 0; i < count; ++i) flush_bond(touched[static_cast<std::size_t>(i)], t);
          jump_env_ += delta;
        }
        occ[static_cast<std::size_t>(y)] = occ[static_cast<std::size_t>(z)];
        occ[static_cast<std::size_t>(z)] = oy;
        ++exchanges_;
        log_event(t, EventKind::exchange, y);
        if (accumulate_env_)
          for (int i = 0; i < count; ++i) {
            const int b = touched[static_cast<std::size_t>(i)];
            status_[static_cast<std::size_t>(b)] = bond_status(b);
          }
        if (accumulate_walk_) {
          const unsigned idx = c_.window_index(eta_, walker_site());
          if (idx != walker_idx_) {
            flush_walker(t);
            walker_idx_ = idx;
          }
        }
      } else {
        const int z = u < p_plus ? 1 : -1;
        const auto r = c_.evaluate(eta_, walker_site());
        const double rate = z > 0 ? r.plus : r.minus;
        const double a = walk_tilt_ ? a_at(t) : 0.0;
        double accept = z > 0 ? n_ * rate / w_plus_ : n_ * rate / w_minus_;
        if (walk_thin) {
          if (z * a > a_bound_ + 1e-12) throw RateBoundViolation("walker rate exceeds its thinning bound");
          accept *= std::exp(z * a);
        }
        if (!(accept > 0.0) || !rng_.bernoulli(accept)) continue;
        if (accumulate_walk_) {
          flush_walker(t);
          jump_walk_ += z * a;
        }
        log_event(t, z > 0 ? EventKind::step_plus : EventKind::step_minus, walker_site());
        if (z > 0) {
          ++plus_;
        } else {
          ++minus_;
        }
        if (accumulate_walk_) walker_idx_ = c_.window_index(eta_, walker_site());
      }
    }
    while (next_record < records.size()) snapshot(records[next_record++]);

    if (accumulate_env_)
      for (int b = 0; b < nb_; ++b) flush_bond(b, T);
    if (accumulate_walk_) flush_walker(T);
    auto& acc = result_.accumulators;
    if (accumulate_env_) {
      acc.log_MH = (jump_env_ - exchange_rate_ * comp_env_) / n_;
      acc.entropy_environment = exchange_rate_ * ent_env_ / n_;
    }
    if (accumulate_walk_) {
      acc.log_Ma = jump_walk_ / n_ - comp_walk_;
      acc.entropy_walker = ent_walk_;
    }
    acc.quadrature_error = quad_err_ * (exchange_rate_ / n_ + 1.0);
  }

  const TorusLattice& lattice_;
  const LocalRate& c_;
  const TiltParams* tilt_;
  const SimulationOptions& opt_;
  Stream& rng_;
  int n_, nb_;
  Configuration eta_;
  std::int64_t plus_ = 0, minus_ = 0;
  std::uint64_t exchanges_ = 0;

  bool env_tilt_ = false, walk_tilt_ = false, tilted_law_ = false, static_env_ = true;
  double exchange_rate_ = 0.0, b_bound_ = 0.0, a_bound_ = 0.0;
  double w_exchange_ = 0.0, w_plus_ = 0.0, w_minus_ = 0.0, total_rate_ = 0.0;
  std::vector<std::vector<double>> bond_diff_;
  std::vector<double> static_diff_;
  std::vector<double> coef_;

  bool accumulate_env_ = false, accumulate_walk_ = false;
  double max_piece_ = 1.0;
  std::vector<int> status_;
  std::vector<double> since_;
  std::array<std::vector<Vec<2>>, 2> static_comp_;
  unsigned walker_idx_ = 0;
  double walker_since_ = 0.0;
  double jump_env_ = 0.0, comp_env_ = 0.0, ent_env_ = 0.0;
  double jump_walk_ = 0.0, comp_walk_ = 0.0, ent_walk_ = 0.0;
  double quad_err_ = 0.0;

  SimulationResult result_;
};

}  // namespace

int Trajectory::walker_site() const noexcept {
  const std::int64_t r = walker() % n;
  return static_cast<int>(r < 0 ? r + n : r);
}

Configuration Trajectory::configuration_at(double t) const {
  if (t >= horizon) return final_state;
  if (t <= 0.0 && !has_events) return initial;
  if (!has_events) throw std::logic_error("Trajectory: event log not recorded");
  Configuration eta = initial;
  for (const auto& e : events) {
    if (e.time > t) break;
    if (e.kind == EventKind::exchange) eta.swap_sites(e.site, e.site + 1 == n ? 0 : e.site + 1);
  }
  return eta;
}

std::int64_t Trajectory::walker_at(double t) const {
  if (t >= horizon) return walker();
  if (t <= 0.0 && !has_events) return 0;
  if (!has_events) throw std::logic_error("Trajectory: event log not recorded");
  std::int64_t x = 0;
  for (const auto& e : events) {
    if (e.time > t) break;
    if (e.kind == EventKind::step_plus) ++x;
    if (e.kind == EventKind::step_minus) --x;
  }
  return x;
}

SimulationResult simulate(const TorusLattice& lattice, const LocalRate& c, const InitialState& init,
                          const TiltParams* tilt, const SimulationOptions& options, Stream& rng) {
  return Engine(lattice, c, init, tilt, options, rng).run();
}

SimulationResult simulate(const TorusLattice& lattice, const LocalRate& c, const Configuration& init,
                          const TiltParams* tilt, const SimulationOptions& options, Stream& rng) {
  return simulate(lattice, c, InitialState{init, 0.0, 0.0}, tilt, options, rng);
}

Configuration environment_view(const Trajectory& traj, double t) {
  return traj.configuration_at(t).shifted(traj.walker_at(t));
}

std::vector<double> uniform_times(double horizon, int intervals) {
  if (intervals < 1) throw std::invalid_argument("uniform_times: need at least one interval");
  std::vector<double> t(static_cast<std::size_t>(intervals) + 1);
  for (int i = 0; i <= intervals; ++i) t[static_cast<std::size_t>(i)] = horizon * i / intervals;
  t.back() = horizon;
  return t;
}

}  // namespace rwdre
