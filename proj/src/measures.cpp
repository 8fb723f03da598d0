#include "rwdre/measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace rwdre {

Configuration sample_bernoulli(const std::vector<double>& probabilities, Stream& rng) {
  std::vector<std::uint8_t> occ(probabilities.size());
  for (std::size_t i = 0; i < occ.size(); ++i) {
    const double p = probabilities[i];
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("sample_bernoulli: probability outside [0,1]");
    occ[i] = rng.uniform() < p ? 1 : 0;
  }
  return Configuration(std::move(occ));
}

Configuration sample_product_profile(const TorusLattice& lattice, const DensityProfile& profile,
                                     Stream& rng) {
  if (profile.min_value() < 0.0 || profile.max_value() > 1.0)
    throw std::invalid_argument("sample_product_profile: profile outside [0,1]");
  return sample_bernoulli(profile.cell_averages(lattice.size()), rng);
}

Configuration sample_canonical(const TorusLattice& lattice, int k, Stream& rng) {
  const int n = lattice.size();
  if (k < 0 || k > n) throw std::invalid_argument("sample_canonical: k outside [0, n]");
  std::vector<std::uint8_t> occ(static_cast<std::size_t>(n), 0);
  std::fill(occ.begin(), occ.begin() + k, 1);
  // Fisher-Yates with the stream's unbiased bounded draw.
  for (int i = n - 1; i > 0; --i) {
    const auto j = static_cast<int>(rng.below(static_cast<std::uint32_t>(i + 1)));
    std::swap(occ[static_cast<std::size_t>(i)], occ[static_cast<std::size_t>(j)]);
  }
  return Configuration(std::move(occ));
}

double bernoulli_kl(double p, double q) noexcept {
  auto term = [](double a, double b) {
    if (a == 0.0) return 0.0;
    if (b == 0.0) return std::numeric_limits<double>::infinity();
    return a * std::log(a / b);
  };
  return term(p, q) + term(1.0 - p, 1.0 - q);
}

double TiltedInitialLaw::log_density(const Configuration& eta) const {
  double total = 0.0;
  for (std::size_t i = 0; i < tilted.size(); ++i) {
    const double v = tilted[i];
    const double r = reference[i];
    if (v == r) continue;
    total += eta[static_cast<int>(i)] ? std::log(v / r) : std::log1p(-v) - std::log1p(-r);
  }
  return total;
}

TiltedInitialLaw tilted_initial_law(const TorusLattice& lattice, const DensityProfile& u0,
                                    const DensityProfile& v0, double interior_eps) {
  if (!u0.is_interior(interior_eps) || !v0.is_interior(interior_eps))
    throw std::invalid_argument("tilted_initial_law: u0 and v0 must be bounded away from 0 and 1");
  const int n = lattice.size();
  TiltedInitialLaw law;
  law.reference = u0.cell_averages(n);
  law.tilted.resize(law.reference.size());
  auto log_odds = [&](double x) {
    const double u = u0(x), v = v0(x);
    return std::log(v) + std::log1p(-u) - std::log(u) - std::log1p(-v);
  };
  std::vector<double> breaks;
  for (double x : u0.knot_positions()) breaks.push_back(x);
  for (double x : v0.knot_positions()) breaks.push_back(x);
  const bool constant_odds = u0.knot_count() == 1 && v0.knot_count() == 1;
  double kl = 0.0;
  for (int x = 0; x < n; ++x) {
    const double site = lattice.coordinate(x);
    std::vector<double> local;
    if (!constant_odds)
      for (double b : breaks)
        for (double shift : {-1.0, 0.0, 1.0}) local.push_back(b + shift);
    const double f = constant_odds ? log_odds(0.0) : tent_average(log_odds, site, n, local);
    const double rho = law.reference[static_cast<std::size_t>(x)];
    const double e = std::exp(f);
    double v = rho * e / (1.0 + rho * (e - 1.0));
    v = std::clamp(v, 0.0, 1.0);
    law.tilted[static_cast<std::size_t>(x)] = f == 0.0 ? rho : v;
    kl += bernoulli_kl(law.tilted[static_cast<std::size_t>(x)], rho);
  }
  law.entropy_per_site = kl / n;
  return law;
}

TiltedSample sample_tilted_initial(const TiltedInitialLaw& law, Stream& rng) {
  TiltedSample s{sample_bernoulli(law.tilted, rng), 0.0};
  s.log_density = law.log_density(s.eta);
  return s;
}

TiltedSample sample_tilted_initial(const TorusLattice& lattice, const DensityProfile& u0,
                                   const DensityProfile& v0, Stream& rng) {
  return sample_tilted_initial(tilted_initial_law(lattice, u0, v0), rng);
}

}  // namespace rwdre
