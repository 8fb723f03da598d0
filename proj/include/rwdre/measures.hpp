#pragma once

#include <vector>

#include "rwdre/lattice.hpp"
#include "rwdre/profile.hpp"
#include "rwdre/rng.hpp"

namespace rwdre {

/// Independent Bernoulli occupancies with the given per-site probabilities.
Configuration sample_bernoulli(const std::vector<double>& probabilities, Stream& rng);

/// Product measure with site probabilities equal to the cell averages of the profile.
Configuration sample_product_profile(const TorusLattice& lattice, const DensityProfile& profile,
                                     Stream& rng);

/// Uniform configuration with exactly k particles.
Configuration sample_canonical(const TorusLattice& lattice, int k, Stream& rng);

struct TiltedInitialLaw {
  std::vector<double> reference;  // cell averages of u0
  std::vector<double> tilted;     // v_x^n
  /// (1/n) sum_x KL(tilted_x || reference_x); the mean of log_density/n.
  double entropy_per_site = 0.0;

  /// log of the likelihood ratio tilted/reference at eta.
  double log_density(const Configuration& eta) const;
};

/// Site probabilities of the tilted initial law built from u0 and v0.
TiltedInitialLaw tilted_initial_law(const TorusLattice& lattice, const DensityProfile& u0,
                                    const DensityProfile& v0, double interior_eps = 1e-9);

struct TiltedSample {
  Configuration eta;
  double log_density = 0.0;  // log(d tilted / d reference)(eta), not normalised by n
};

TiltedSample sample_tilted_initial(const TorusLattice& lattice, const DensityProfile& u0,
                                   const DensityProfile& v0, Stream& rng);
TiltedSample sample_tilted_initial(const TiltedInitialLaw& law, Stream& rng);

/// Bernoulli KL divergence p log(p/q) + (1-p) log((1-p)/(1-q)), 0 log 0 = 0.
double bernoulli_kl(double p, double q) noexcept;

}  // namespace rwdre
