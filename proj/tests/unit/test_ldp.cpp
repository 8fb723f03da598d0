#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "rwdre/dynamics.hpp"
#include "rwdre/ldp.hpp"
#include "rwdre/measures.hpp"
#include "rwdre/rate_breakdown.hpp"
#include "rwdre/rng.hpp"

using namespace rwdre;

namespace {

constexpr double kPi = std::numbers::pi;

PathField constant_path(double rho, double T, int frames = 10) {
  const auto times = uniform_times(T, frames);
  return PathField(times, std::vector<DensityProfile>(times.size(), DensityProfile::constant(rho)));
}

double grid_sup(double xp, double vp, double vm) {
  double best = -kInfinity;
  for (int i = -20000; i <= 20000; ++i) best = std::max(best, legendre_objective(i * 1e-3, xp, vp, vm));
  return best;
}

const HydroSolution& heat_solution() {
  static const HydroSolution sol = solve_perturbed(DensityProfile::cosine(0.5, 0.25), TiltParams{},
                                                   LocalRate::intro_example(), 1.0, SpaceTimeGrid::make(256, 1.0, 100));
  return sol;
}

}  // namespace

TEST(EntropyH, Values) {
  const auto u0 = DensityProfile::cosine(0.5, 0.3);
  EXPECT_EQ(entropy_h(u0, u0), 0.0);
  EXPECT_NEAR(entropy_h(DensityProfile::constant(0.25), DensityProfile::constant(0.5)), 0.1308120359, 1e-10);
  const auto bumped = DensityProfile({{0.0, 0.5}, {0.3, 0.5}, {0.3 + 1e-13, 0.9}, {0.3 + 2e-13, 0.5}});
  EXPECT_NEAR(entropy_h(bumped, DensityProfile::constant(0.5)), 0.0, 1e-12);
}

TEST(EntropyH, NonNegative) {
  Stream rng(1, 1);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> a(12), b(12);
    for (int i = 0; i < 12; ++i) {
      a[i] = 0.05 + 0.9 * rng.uniform();
      b[i] = 0.05 + 0.9 * rng.uniform();
    }
    EXPECT_GT(entropy_h(DensityProfile::uniform(a), DensityProfile::uniform(b)), 0.0);
  }
}

TEST(JFunctional, ConstantTestFunctionVanishes) {
  const auto& sol = heat_solution();
  EXPECT_NEAR(J_functional(TestFunctionH::spatially_constant(1.0, 0.7), sol.u), 0.0, 1e-12);
}

TEST(JFunctional, ConstantDensityClosedForm) {
  const double theta = 0.3, T = 0.8;
  const auto H = TestFunctionH::cosine_mode(T, 1, theta);
  const auto path = constant_path(0.5, T, 40);
  EXPECT_NEAR(J_functional(H, path), -theta * theta * kPi * kPi * T / 2, 1e-6);
  EXPECT_NEAR(J_functional(H, path, 2.0), -2 * theta * theta * kPi * kPi * T / 2, 1e-6);
}

TEST(JFunctional, HeatSolutionHasNoLinearPart) {
  const auto& sol = heat_solution();
  TestFunctionH H(1.0);
  H.add({Trig::cosine, 1, 1, 0.4});
  H.add({Trig::sine, 2, 0, -0.3});
  TestFunctionH H2(1.0);
  for (auto term : H.terms()) {
    term.coefficient *= 2;
    H2.add(term);
  }
  const double j1 = J_functional(H, sol.u);
  const double j2 = J_functional(H2, sol.u);
  const double quadratic = -(j2 - 2 * j1) / 2;
  EXPECT_GT(quadratic, 0.0);
  EXPECT_NEAR(j1 + quadratic, 0.0, 1e-3);
}

TEST(IEx, HeatSolutionIsFree) {
  const auto& sol = heat_solution();
  const auto r = I_ex(sol.u, DensityProfile::cosine(0.5, 0.25));
  EXPECT_NEAR(r.value, 0.0, 1e-3);
  for (double t : r.theta) EXPECT_NEAR(t, 0.0, 1e-2);
}

TEST(IEx, ConstantPathFromMatchingStart) {
  const auto r = I_ex(constant_path(0.3, 1.0), DensityProfile::constant(0.3));
  EXPECT_NEAR(r.value, 0.0, 1e-12);
  const auto shifted = I_ex(constant_path(0.3, 1.0), DensityProfile::constant(0.5));
  EXPECT_NEAR(shifted.value, bernoulli_kl(0.3, 0.5), 1e-10);
}

TEST(IEx, QuadraticFormSymmetricPositive) {
  const auto& sol = heat_solution();
  IexOptions opt;
  opt.basis = {4, 3};
  const auto form = assemble_J(sol.u, 1.0, opt);
  const std::size_t N = form.b.size();
  ASSERT_EQ(N, 2u * 4 * 4);
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j) EXPECT_EQ(form.A[i * N + j], form.A[j * N + i]);
  Stream rng(2, 0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> th(N);
    for (double& x : th) x = 2 * rng.uniform() - 1;
    double q = 0.0;
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t j = 0; j < N; ++j) q += th[i] * form.A[i * N + j] * th[j];
    EXPECT_GE(q, -1e-10);
  }
}

TEST(IEx, RecoversControlAndGrowsWithBasis) {
  const auto u0 = DensityProfile::cosine(0.5, 0.2);
  TiltParams tilt;
  tilt.H = TestFunctionH::cosine_mode(1.0, 1, 0.2);
  const auto sol = solve_perturbed(u0, tilt, LocalRate::intro_example(), 1.0, SpaceTimeGrid::make(256, 1.0, 100));
  double previous = -1.0;
  for (auto basis : {BasisSpec{1, 0}, BasisSpec{2, 2}, BasisSpec{4, 4}, BasisSpec{8, 6}}) {
    IexOptions opt;
    opt.basis = basis;
    const auto r = I_ex(sol.u, u0, opt);
    EXPECT_GE(r.value, previous - 1e-9);
    previous = r.value;
  }
  const auto full = I_ex(sol.u, u0);
  const double J0 = J_functional(*tilt.H, sol.u);
  EXPECT_NEAR(full.sup_J, J0, 2e-3 * J0 + 1e-4);
  EXPECT_NEAR(full.theta[0], 0.2, 5e-3);  // cos(2 pi x) T_0
  EXPECT_GE(full.sup_J, J0 - 1e-9);
}

TEST(AStar, ClosedFormCases) {
  EXPECT_EQ(a_star(0.0, 0.7, 0.7), 0.0);
  EXPECT_NEAR(a_star(1.5, 1.0, 1.0), std::log(2.0), 1e-15);
  EXPECT_NEAR(a_star(0.8, 0.4, 0.0), std::log(2.0), 1e-15);
  EXPECT_NEAR(a_star(-0.8, 0.0, 0.2), -std::log(4.0), 1e-15);
  EXPECT_EQ(a_star(-0.1, 0.4, 0.0), -kInfinity);
  EXPECT_EQ(a_star(0.1, 0.0, 0.4), kInfinity);
  EXPECT_EQ(pointwise_cost(0.0, 0.4, 0.0), 0.4);
  EXPECT_EQ(pointwise_cost(-0.1, 0.4, 0.0), kInfinity);
  EXPECT_EQ(pointwise_cost(0.0, 0.0, 0.0), 0.0);
  EXPECT_EQ(pointwise_cost(0.3, 0.0, 0.0), kInfinity);
  EXPECT_EQ(a_star(0.5, 1e-13, 1.0), kInfinity);  // below the degeneracy threshold
}

TEST(AStar, BothExpressionsAgree) {
  Stream rng(3, 0);
  for (int i = 0; i < 10000; ++i) {
    const double xp = 10 * rng.uniform() - 5, vp = 0.01 + 3 * rng.uniform(), vm = 0.01 + 3 * rng.uniform();
    EXPECT_NEAR(a_star_plus_form(xp, vp, vm), a_star_minus_form(xp, vp, vm), 1e-10);
  }
}

TEST(AStar, LegendreDualityAgainstGridSearch) {
  Stream rng(4, 0);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double xp = 10 * rng.uniform() - 5, vp = 0.01 + 3 * rng.uniform(), vm = 0.01 + 3 * rng.uniform();
    const double exact = pointwise_cost(xp, vp, vm);
    EXPECT_NEAR(exact, legendre_objective(a_star(xp, vp, vm), xp, vp, vm), 1e-12);
    worst = std::max(worst, std::abs(exact - grid_sup(xp, vp, vm)));
  }
  EXPECT_LE(worst, 1e-4);
}

TEST(IRw, LinearPathInSymmetricEquilibrium) {
  const auto c = LocalRate::intro_example();
  for (double T : {1.0, 2.5}) {
    const auto x = WalkerPath::from_function([](double t) { return t; }, T, 500);
    const auto r = I_rw(x, constant_density(0.5), c);
    EXPECT_TRUE(r.finite());
    EXPECT_NEAR(r.value, T * 0.4671600246, 1e-9);
    EXPECT_NEAR(r.value, T * (std::log(1 + std::sqrt(2.0)) - (std::sqrt(2.0) - 1)), 1e-12);
  }
}

TEST(IRw, LlnPathIsFree) {
  const auto& sol = heat_solution();
  const auto x = WalkerPath::from_samples(sol.u.times(), sol.f);
  const auto r = I_rw(x, density_of(sol.u), LocalRate::intro_example());
  EXPECT_NEAR(r.value, 0.0, 1e-3);
}

TEST(IRw, StepPathIsInfinite) {
  const auto x = WalkerPath::from_function([](double t) { return t < 0.5 ? 0.0 : 0.5; }, 1.0, 100);
  const auto r = I_rw(x, constant_density(0.5), LocalRate::intro_example());
  EXPECT_FALSE(r.absolutely_continuous);
  EXPECT_EQ(r.value, kInfinity);
}

TEST(IRw, DegenerateRateFlags) {
  const auto c = LocalRate::constant(Rational(1), Rational(0));
  const auto back = WalkerPath::from_function([](double t) { return -t; }, 1.0, 50);
  const auto r = I_rw(back, constant_density(0.5), c);
  EXPECT_FALSE(r.finite3);
  EXPECT_EQ(r.value, kInfinity);
  const auto fwd = WalkerPath::from_function([](double t) { return 2 * t; }, 1.0, 50);
  const auto ok = I_rw(fwd, constant_density(0.5), c);
  EXPECT_TRUE(ok.finite());
  EXPECT_NEAR(ok.value, 2 * std::log(2.0) - 2 + 1, 1e-12);
}

TEST(JSmall, DualityAttainedAndBounded) {
  const auto c = LocalRate::intro_example();
  const auto& sol = heat_solution();
  const auto x = WalkerPath::from_function([](double t) { return 0.3 * t + 0.1 * std::sin(3 * t); }, 1.0, 400);
  const auto pi = density_of(sol.u);
  const auto r = I_rw(x, pi, c);
  EXPECT_EQ(j_functional(TimeFunction::constant(0.0), pi, x, c), 0.0);
  EXPECT_NEAR(j_functional(r.a_samples, pi, x, c), r.value, 1e-6);
  EXPECT_NEAR(j_functional(TimeFunction::sampled(x.times, r.a_samples), pi, x, c), r.value, 1e-6);
  for (double a0 = -1.0; a0 <= 1.0; a0 += 0.1)
    for (double a1 = -1.0; a1 <= 1.0; a1 += 0.25)
      EXPECT_LE(j_functional(TimeFunction::polynomial({a0, a1}), pi, x, c), r.value + 1e-6);
}

TEST(JSmall, ConstantTiltClosedForm) {
  const double a = 0.3;
  const auto x = WalkerPath::from_function([&](double t) { return std::sinh(a) * t; }, 1.0, 200);
  const double j = j_functional(TimeFunction::constant(a), constant_density(0.5), x, LocalRate::intro_example());
  EXPECT_NEAR(j, 0.0460175739, 1e-10);
  EXPECT_NEAR(j, a * std::sinh(a) - (std::cosh(a) - 1), 1e-14);
}

TEST(ContractRate, LlnPathCostsNothing) {
  const auto u0 = DensityProfile::cosine(0.5, 0.25);
  const auto c = LocalRate::intro_example();
  ContractOptions opt;
  opt.grid = SpaceTimeGrid::make(128, 1.0, 50);
  const auto sol = solve_perturbed(u0, TiltParams{}, c, 1.0, opt.grid);
  const auto r = contract_rate(WalkerPath::from_samples(sol.u.times(), sol.f), c, u0, opt);
  ASSERT_TRUE(r.feasible);
  EXPECT_EQ(r.candidates[r.best].label, "null");
  EXPECT_NEAR(r.value, 0.0, 1e-3);
}

TEST(ContractRate, SweepNeverWorseThanReference) {
  const auto c = LocalRate::intro_example();
  const auto u0 = DensityProfile::constant(0.5);
  for (double w : {-0.5, 0.2, 0.6}) {
    const auto x = WalkerPath::from_function([w](double t) { return w * t; }, 1.0, 100);
    const auto r = contract_rate(x, c, u0);
    EXPECT_LE(r.value, I_rw(x, constant_density(0.5), c).value + 1e-9);
  }
}

TEST(ContractRate, FastPathStillFinite) {
  const auto c = LocalRate::intro_example();  // v+ <= 2/3 everywhere
  const auto x = WalkerPath::from_function([](double t) { return 2.0 * t; }, 1.0, 100);
  const auto r = contract_rate(x, c, DensityProfile::constant(0.5));
  EXPECT_TRUE(r.feasible);
  EXPECT_TRUE(std::isfinite(r.value));
}

TEST(ContractRate, InfeasibleReported) {
  const auto c = LocalRate::constant(Rational(1), Rational(0));
  const auto x = WalkerPath::from_function([](double t) { return -t; }, 1.0, 50);
  ContractOptions opt;
  opt.include_null = false;
  const auto r = contract_rate(x, c, DensityProfile::constant(0.5), opt);
  EXPECT_FALSE(r.feasible);
  EXPECT_EQ(r.value, kInfinity);
}

TEST(Luxemburg, Values) {
  EXPECT_EQ(luxemburg_norm({0.0, 1.0}, {0.0, 0.0}, YoungFunction::phi), 0.0);
  const double lambda = luxemburg_norm({0.0, 1.0}, {1.0, 1.0}, YoungFunction::phi);
  EXPECT_NEAR(lambda, 0.8064659942, 1e-8);
  EXPECT_NEAR(young_phi(1.0 / lambda), 1.0, 1e-7);
  std::vector<double> t, f, f2;
  for (int i = 0; i <= 100; ++i) {
    t.push_back(i / 100.0);
    f.push_back(std::sin(3.0 * i / 100.0) + 0.2);
    f2.push_back(2 * f.back());
  }
  for (auto which : {YoungFunction::phi, YoungFunction::phi_conjugate})
    EXPECT_NEAR(luxemburg_norm(t, f2, which), 2 * luxemburg_norm(t, f, which), 1e-6);
}

TEST(Luxemburg, ConjugateMatchesGridLegendre) {
  for (double y : {0.0, 0.1, 0.7, 1.5, 3.0, 6.0}) {
    double best = 0.0;
    for (int i = 0; i <= 2000000; ++i) {
      const double x = i * 1e-4;
      best = std::max(best, x * y - young_phi(x));
    }
    EXPECT_NEAR(young_phi_conjugate(y), best, 1e-6 * std::max(1.0, best));
  }
  EXPECT_EQ(young_phi_conjugate(-1.0), 0.0);
}

TEST(RateBreakdownTest, ConstantTilt) {
  TiltParams tilt;
  tilt.a = TimeFunction::constant(0.3);
  RateBreakdownOptions opt;
  opt.grid = SpaceTimeGrid::make(64, 1.0, 100);
  const auto r = rate_breakdown(DensityProfile::constant(0.5), tilt, LocalRate::intro_example(), 1.0, opt);
  EXPECT_NEAR(r.j, 0.0460175739, 1e-8);
  EXPECT_NEAR(r.Irw, 0.0460175739, 1e-8);
  EXPECT_NEAR(r.Iex, 0.0, 1e-12);
  EXPECT_EQ(r.entropy_h, 0.0);
  EXPECT_EQ(r.J, 0.0);
  const auto json = to_json(r);
  EXPECT_TRUE(json.contains("I_rw"));
  EXPECT_TRUE(json["flags"]["absolutely_continuous"].get<bool>());
  EXPECT_EQ(json["optimizer"]["theta"].size(), 112u);
}
