#pragma once

#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "rwdre/fields.hpp"
#include "rwdre/hydro.hpp"
#include "rwdre/local_function.hpp"
#include "rwdre/profile.hpp"
#include "rwdre/test_function.hpp"

namespace rwdre {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();
inline constexpr double kTolZero = 1e-12;

/// Density pi_t(x) at time t and absolute (lifted) position x.
using DensityAt = std::function<double(double t, double x)>;

DensityAt density_of(const HydroSolution& sol);
DensityAt density_of(const PathField& field);
DensityAt constant_density(double rho);

/// Integral of the Bernoulli relative entropy of pi0(x) with respect to u0(x).
double entropy_h(const DensityProfile& pi0, const DensityProfile& u0);

/// pi_T(H_T) - pi_0(H_0) - int pi_t(d_t H + D Lap H) dt - D int int (d_x H)^2 pi (1 - pi).
double J_functional(const TestFunctionH& H, const PathField& pi, double diffusion = 1.0);

struct BasisSpec {
  int max_mode = 8;    // spatial frequencies 1..max_mode, cosine and sine
  int max_degree = 6;  // Chebyshev degrees 0..max_degree in time
};

struct IexOptions {
  BasisSpec basis;
  double diffusion = 1.0;
  double null_tolerance = 1e-10;        // relative eigenvalue cut for the pseudo-inverse
  double indefinite_tolerance = 1e-9;   // relative negative eigenvalue that is reported
};

class IndefiniteFormError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct IexResult {
  double value = 0.0;        // h + sup_H J(H; pi)
  double entropy = 0.0;      // h(pi_0 | u0)
  double sup_J = 0.0;
  std::vector<double> theta;  // optimiser coefficients, ordered as optimizer.terms()
  TestFunctionH optimizer;
  double min_eigenvalue = 0.0;
  double max_eigenvalue = 0.0;
  int rank = 0;
};

/// Assembles J(theta) = theta.b - theta' A theta on the basis and returns
/// h + b' A^+ b / 4 at theta* = A^+ b / 2.
IexResult I_ex(const PathField& pi, const DensityProfile& u0, const IexOptions& options = {});

/// Linear part b and quadratic form A of J on the basis (exposed for tests).
struct QuadraticForm {
  std::vector<TestFunctionTerm> basis;
  std::vector<double> b;
  std::vector<double> A;  // row-major, basis.size()^2
};
QuadraticForm assemble_J(const PathField& pi, double horizon, const IexOptions& options);

/// a x' - v+ (e^a - 1) - v- (e^{-a} - 1).
double legendre_objective(double a, double xp, double vp, double vm) noexcept;
/// Maximiser of legendre_objective; +-infinity in the degenerate cases.
double a_star(double xp, double vp, double vm, double tol_zero = kTolZero) noexcept;
/// log((x' + sqrt(x'^2 + 4 v+ v-)) / (2 v+)).
double a_star_plus_form(double xp, double vp, double vm) noexcept;
/// -log((-x' + sqrt(x'^2 + 4 v+ v-)) / (2 v-)).
double a_star_minus_form(double xp, double vp, double vm) noexcept;
/// sup_a legendre_objective (may be +infinity).
double pointwise_cost(double xp, double vp, double vm, double tol_zero = kTolZero) noexcept;

struct WalkerPath {
  std::vector<double> times;
  std::vector<double> positions;  // lifted, positions[0] = 0

  static WalkerPath from_function(const std::function<double(double)>& x, double horizon, int intervals);
  static WalkerPath from_samples(std::vector<double> times, std::vector<double> positions);
  /// Gaussian-kernel smoothing of a (step) path, bandwidth in time units.
  static WalkerPath mollified(const WalkerPath& raw, double bandwidth);

  /// Central differences, one-sided at the ends.
  std::vector<double> derivative() const;
  double max_increment() const;
};

struct IrwOptions {
  double atom_threshold = 0.0;  // 0: sqrt of the largest time step
  double tol_zero = kTolZero;
};

struct IrwResult {
  double value = 0.0;
  bool absolutely_continuous = true;
  bool finite1 = true;  // integral of |x'| log+ |x'|
  bool finite2 = true;  // x' > 0 only where v+ > 0
  bool finite3 = true;  // x' < 0 only where v- > 0
  std::vector<double> a_samples;
  std::vector<double> velocity;
  std::vector<double> density;

  bool finite() const noexcept { return absolutely_continuous && finite1 && finite2 && finite3; }
};

IrwResult I_rw(const WalkerPath& x, const DensityAt& pi, const LocalRate& c, const IrwOptions& options = {});

/// Integration-by-parts form of a(T)x_T - int (a' x + sum_z v^z (e^{za} - 1)),
/// trapezoid on the walker grid with the same x' reconstruction as I_rw.
double j_functional(const TimeFunction& a, const DensityAt& pi, const WalkerPath& x, const LocalRate& c);
double j_functional(const std::vector<double>& a_nodes, const DensityAt& pi, const WalkerPath& x,
                    const LocalRate& c);

struct ContractOptions {
  std::vector<double> densities;  // constant candidates; empty: 0.05, 0.10, ..., 0.95
  std::vector<TestFunctionH> controls;
  bool include_null = true;
  SpaceTimeGrid grid = SpaceTimeGrid::make(128, 1.0, 50);
  IexOptions iex;
  IrwOptions irw;
};

struct ContractCandidate {
  std::string label;
  double Irw = kInfinity;
  double Iex = kInfinity;
  double total = kInfinity;
};

struct ContractResult {
  double value = kInfinity;  // upper bound on I(x)
  bool feasible = false;
  std::size_t best = 0;
  std::vector<ContractCandidate> candidates;
  std::string message;
};

ContractResult contract_rate(const WalkerPath& x, const LocalRate& c, const DensityProfile& u0,
                             const ContractOptions& options = {});

enum class YoungFunction { phi, phi_conjugate };

/// x log(1 + x).
double young_phi(double x) noexcept;
/// sup_{x >= 0} { x y - x log(1 + x) }.
double young_phi_conjugate(double y);
/// inf{ lambda > 0 : int Phi(|f| / lambda) dt <= 1 }, trapezoid in time.
double luxemburg_norm(const std::vector<double>& times, const std::vector<double>& values, YoungFunction which,
                      double tolerance = 1e-8);

}  // namespace rwdre
