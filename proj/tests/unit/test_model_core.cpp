#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <map>
#include <numbers>

#include "rwdre/lattice.hpp"
#include "rwdre/local_function.hpp"
#include "rwdre/measures.hpp"
#include "rwdre/polynomial.hpp"
#include "rwdre/profile.hpp"
#include "rwdre/rational.hpp"
#include "rwdre/rng.hpp"

using namespace rwdre;

TEST(Philox, KnownAnswerZeroKeyZeroCounter) {
  const auto out = Philox4x32::apply({0, 0, 0, 0}, {0, 0});
  EXPECT_EQ(out[0], 0x6627e8d5u);
  EXPECT_EQ(out[1], 0xe169c58du);
  EXPECT_EQ(out[2], 0xbc57ac4cu);
  EXPECT_EQ(out[3], 0x9b00dbd8u);
}

TEST(Philox, KnownAnswerAllOnes) {
  const auto out = Philox4x32::apply({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu});
  EXPECT_EQ(out[0], 0x408f276du);
  EXPECT_EQ(out[1], 0x41c83b0eu);
  EXPECT_EQ(out[2], 0xa20bc7c6u);
  EXPECT_EQ(out[3], 0x6d5451fdu);
}

TEST(Philox, KnownAnswerPiDigits) {
  const auto out = Philox4x32::apply({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u});
  EXPECT_EQ(out[0], 0xd16cfe09u);
  EXPECT_EQ(out[1], 0x94fdccebu);
  EXPECT_EQ(out[2], 0x5001e420u);
  EXPECT_EQ(out[3], 0x24126ea1u);
}

TEST(Stream, ReproducibleAndDisjoint) {
  Stream a(42, 7), b(42, 7), c(42, 8), d(43, 7);
  for (int i = 0; i < 100; ++i) {
    const auto x = a();
    EXPECT_EQ(x, b());
    (void)c();
    (void)d();
  }
  Stream e(42, 7), f(42, 8), g(43, 7);
  int same_stream = 0, same_seed = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto x = e();
    same_stream += x == f();
    same_seed += x == g();
  }
  EXPECT_LT(same_stream, 3);
  EXPECT_LT(same_seed, 3);
}

TEST(Stream, UniformAndBelowRanges) {
  Stream s(1, 1);
  double sum = 0.0;
  std::array<int, 5> counts{};
  for (int i = 0; i < 100000; ++i) {
    const double u = s.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
    const auto k = s.below(5);
    ASSERT_LT(k, 5u);
    ++counts[k];
  }
  EXPECT_NEAR(sum / 100000, 0.5, 4 * std::sqrt(1.0 / 12 / 100000));
  for (int c : counts) EXPECT_NEAR(c / 100000.0, 0.2, 4 * std::sqrt(0.16 / 100000));
}

TEST(StreamId, DistinctTriples) {
  EXPECT_NE(stream_id(1, 32, 0), stream_id(1, 32, 1));
  EXPECT_NE(stream_id(1, 32, 0), stream_id(1, 64, 0));
  EXPECT_NE(stream_id(1, 32, 0), stream_id(2, 32, 0));
  EXPECT_EQ(stream_id(3, 128, 9), stream_id(3, 128, 9));
}

TEST(Lattice, WrapAndBonds) {
  TorusLattice t(8);
  EXPECT_EQ(t.wrap(-1), 7);
  EXPECT_EQ(t.wrap(17), 1);
  EXPECT_DOUBLE_EQ(t.coordinate(2), 0.25);
  EXPECT_EQ(t.bond_count(), 8);
  EXPECT_EQ(TorusLattice(2).bond_count(), 1);
}

TEST(Configuration, ShiftAndCount) {
  const auto eta = Configuration::from_string("1100010");
  EXPECT_EQ(eta.particle_count(), 3);
  EXPECT_EQ(eta.to_string(), "1100010");
  const auto s = eta.shifted(1);  // s(z) = eta(z + 1)
  EXPECT_EQ(s.to_string(), "1000101");
  EXPECT_EQ(eta.shifted(-1).shifted(1), eta);
  EXPECT_EQ(eta.shifted(7), eta);
  auto m = eta;
  m.swap_sites(0, 2);
  EXPECT_EQ(m.to_string(), "0110010");
  EXPECT_THROW(Configuration::from_string("10x"), std::invalid_argument);
}

TEST(Rational, Parse) {
  EXPECT_EQ(parse_rational("1/3"), Rational(1, 3));
  EXPECT_EQ(parse_rational("0.25"), Rational(1, 4));
  EXPECT_EQ(parse_rational("-2"), Rational(-2));
  EXPECT_EQ(to_string(Rational(6, 4)), "3/2");
  EXPECT_THROW(parse_rational("abc"), std::invalid_argument);
}

TEST(Polynomial, EvaluateAndDifferentiate) {
  Polynomial<Rational> p({Rational(1), Rational(-2), Rational(3)});  // 1 - 2x + 3x^2
  EXPECT_EQ(p(Rational(1, 2)), Rational(3, 4));
  EXPECT_EQ(p.derivative(), Polynomial<Rational>({Rational(-2), Rational(6)}));
  EXPECT_DOUBLE_EQ(p(2.0), 9.0);
}

TEST(SampleProductProfile, DegenerateProfiles) {
  TorusLattice lat(50);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Stream rng(seed, 0);
    EXPECT_EQ(sample_product_profile(lat, DensityProfile::constant(1.0), rng).particle_count(), 50);
    EXPECT_EQ(sample_product_profile(lat, DensityProfile::constant(0.0), rng).particle_count(), 0);
  }
}

TEST(SampleProductProfile, HalfDensityConcentration) {
  TorusLattice lat(10000);
  int inside = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Stream rng(seed, 3);
    const double mean = sample_product_profile(lat, DensityProfile::constant(0.5), rng).particle_count() / 1e4;
    inside += std::abs(mean - 0.5) <= 0.015;
  }
  EXPECT_GE(inside, 97);
}

TEST(SampleCanonical, Extremes) {
  TorusLattice lat(9);
  Stream rng(5, 5);
  EXPECT_EQ(sample_canonical(lat, 0, rng).particle_count(), 0);
  EXPECT_EQ(sample_canonical(lat, 9, rng).particle_count(), 9);
  EXPECT_EQ(sample_canonical(lat, 4, rng).particle_count(), 4);
}

TEST(SampleCanonical, UniformOverSupport) {
  TorusLattice lat(4);
  Stream rng(11, 0);
  std::map<std::string, int> freq;
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) ++freq[sample_canonical(lat, 2, rng).to_string()];
  ASSERT_EQ(freq.size(), 6u);
  for (const auto& [config, count] : freq) EXPECT_NEAR(count / double(draws), 1.0 / 6, 0.02) << config;
}

TEST(TiltedInitial, IdenticalProfilesGiveNoTilt) {
  TorusLattice lat(64);
  const auto u0 = DensityProfile::cosine(0.5, 0.25);
  const auto law = tilted_initial_law(lat, u0, u0);
  for (int x = 0; x < 64; ++x) EXPECT_EQ(law.tilted[x], law.reference[x]);
  EXPECT_EQ(law.entropy_per_site, 0.0);
  Stream a(3, 1), b(3, 1);
  const auto tilted = sample_tilted_initial(law, a);
  const auto plain = sample_product_profile(lat, u0, b);
  EXPECT_EQ(tilted.eta, plain);
  EXPECT_EQ(tilted.log_density, 0.0);
}

TEST(TiltedInitial, ConstantProfiles) {
  TorusLattice lat(16);
  const auto up = tilted_initial_law(lat, DensityProfile::constant(0.5), DensityProfile::constant(0.75));
  const auto down = tilted_initial_law(lat, DensityProfile::constant(0.5), DensityProfile::constant(0.25));
  for (int x = 0; x < 16; ++x) {
    EXPECT_NEAR(up.tilted[x], 0.75, 1e-12);
    EXPECT_NEAR(down.tilted[x], 0.25, 1e-12);
  }
  EXPECT_NEAR(down.entropy_per_site, 0.1308120359, 1e-9);
}

TEST(TiltedInitial, LogDensityMatchesSiteProbabilities) {
  TorusLattice lat(8);
  const auto law = tilted_initial_law(lat, DensityProfile::constant(0.5), DensityProfile::constant(0.25));
  const auto eta = Configuration::from_string("10000001");
  const double expected = 2 * std::log(0.25 / 0.5) + 6 * std::log(0.75 / 0.5);
  EXPECT_NEAR(law.log_density(eta), expected, 1e-12);
}

TEST(BernoulliKl, Values) {
  EXPECT_NEAR(bernoulli_kl(0.25, 0.5), 0.1308120359, 1e-10);
  EXPECT_EQ(bernoulli_kl(0.3, 0.3), 0.0);
  EXPECT_EQ(bernoulli_kl(0.0, 0.5), std::log(2.0));
  EXPECT_TRUE(std::isinf(bernoulli_kl(0.5, 0.0)));
}

TEST(MeanFieldVelocity, IntroExampleExact) {
  const auto c = LocalRate::intro_example();
  const auto poly = mean_field_polynomials(c);
  const Polynomial<Rational> expected({Rational(-1, 3), Rational(2, 3)});
  EXPECT_EQ(poly.drift, expected);
  for (auto rho : {Rational(0), Rational(1, 4), Rational(1, 2), Rational(1)})
    EXPECT_EQ(poly.drift(rho), (2 * rho - 1) / 3);
  const auto half = mean_field_velocity(c, 0.5);
  EXPECT_DOUBLE_EQ(half.plus, 0.5);
  EXPECT_DOUBLE_EQ(half.minus, 0.5);
  EXPECT_DOUBLE_EQ(half.drift, 0.0);
}

TEST(MeanFieldVelocity, Archetype) {
  const auto c = LocalRate::archetype(Rational(1), Rational(2));
  const auto v = mean_field_velocity(c, 0.25);
  EXPECT_DOUBLE_EQ(v.plus, 1.25);
  EXPECT_DOUBLE_EQ(v.minus, 1.75);
  EXPECT_DOUBLE_EQ(v.drift, -0.5);
}

TEST(MeanFieldVelocity, PolynomialDeterminedByEnumerationMatchesMonteCarlo) {
  // Three-site window, non-linear mean.
  std::vector<Rational> plus(8), minus(8);
  for (unsigned b = 0; b < 8; ++b) {
    plus[b] = Rational(1 + static_cast<int>(b & 1u) * 2 + static_cast<int>((b >> 1) & (b >> 2) & 1u), 5);
    minus[b] = Rational(static_cast<int>(b == 0) + 1, 3);
  }
  const LocalRate c({-1, 0, 2}, plus, minus);
  const auto poly = mean_field_polynomials(c);
  EXPECT_LE(poly.plus.degree(), 3u);
  const double rho = 0.3;
  Stream rng(9, 9);
  TorusLattice lat(5);
  double sum = 0.0, sum2 = 0.0;
  const int samples = 100000;
  for (int i = 0; i < samples; ++i) {
    Configuration eta(5);
    for (int x = 0; x < 5; ++x) eta.set(x, rng.bernoulli(rho));
    const double v = c.evaluate(eta, 0).plus;
    sum += v;
    sum2 += v * v;
  }
  const double mean = sum / samples;
  const double se = std::sqrt((sum2 / samples - mean * mean) / samples);
  EXPECT_NEAR(mean, mean_field_velocity(c, rho).plus, 4 * se);
  EXPECT_NEAR(to_double(poly.plus(Rational(3, 10))), mean_field_velocity(c, rho).plus, 1e-14);
}

TEST(LocalRate, IntroEvaluation) {
  const auto c = LocalRate::intro_example();
  const auto eta = Configuration::from_string("0100");
  const auto occupied = c.evaluate(eta, 1);
  const auto empty = c.evaluate(eta, 2);
  EXPECT_DOUBLE_EQ(occupied.plus, 2.0 / 3);
  EXPECT_DOUBLE_EQ(occupied.minus, 1.0 / 3);
  EXPECT_DOUBLE_EQ(empty.plus, 1.0 / 3);
  EXPECT_DOUBLE_EQ(empty.minus, 2.0 / 3);
  EXPECT_TRUE(c.normalized());
  const auto k = LocalRate::constant(Rational(1, 2), Rational(1, 2));
  for (int x = 0; x < 4; ++x) {
    EXPECT_DOUBLE_EQ(k.evaluate(eta, x).plus, 0.5);
    EXPECT_DOUBLE_EQ(k.evaluate(eta, x).minus, 0.5);
  }
}

TEST(LocalRate, SerializeRoundTrip) {
  const auto c = LocalRate::archetype(Rational(1, 3), Rational(2, 5));
  const auto back = LocalRate::parse(c.serialize());
  EXPECT_EQ(back.serialize(), c.serialize());
  for (unsigned i = 0; i < c.window_count(); ++i) {
    EXPECT_EQ(back.at_index(i).plus, c.at_index(i).plus);
    EXPECT_EQ(back.at_index(i).minus, c.at_index(i).minus);
  }
  const auto empty = LocalRate::constant(Rational(1), Rational(0));
  EXPECT_EQ(LocalRate::parse(empty.serialize()).serialize(), empty.serialize());
  EXPECT_THROW(LocalRate::parse("support 0\n0 1 1\n"), std::invalid_argument);
  EXPECT_THROW(LocalRate::parse("support 0\n0 -1 1\n1 1 1\n"), std::invalid_argument);
}

TEST(CanonicalAverage, FirstAndSecondMoments) {
  const auto first = LocalFunction::occupation_product({1});
  const auto second = LocalFunction::occupation_product({1, 2});
  for (int ell = 2; ell <= 12; ++ell)
    for (int k = 0; k <= ell; ++k) {
      EXPECT_EQ(first.canonical_average_exact(k, ell), Rational(k, ell));
      EXPECT_EQ(second.canonical_average_exact(k, ell), Rational(k * (k - 1), ell * (ell - 1)));
      const Rational gap = Rational(k * (k - 1), ell * (ell - 1)) - Rational(k * k, ell * ell);
      EXPECT_LE(gap < 0 ? -gap : gap, Rational(1, ell - 1));
      EXPECT_NEAR(second.canonical_average(k, ell), double(k) * (k - 1) / (ell * (ell - 1.0)), 1e-14);
    }
  EXPECT_EQ(second.canonical_average_exact(2, 2), Rational(1));
}

TEST(DensityProfileTest, IntegralsAndMoments) {
  const auto p = DensityProfile({{0.0, 0.2}, {0.3, 0.9}, {0.7, 0.4}});
  // Trapezoid per segment, periodic closing segment from 0.7 to 1.0.
  const double mass = 0.3 * (0.2 + 0.9) / 2 + 0.4 * (0.9 + 0.4) / 2 + 0.3 * (0.4 + 0.2) / 2;
  EXPECT_NEAR(p.mass(), mass, 1e-15);
  EXPECT_NEAR(p.integral(0.5, 1.5), mass, 1e-14);
  EXPECT_NEAR(p(0.15), 0.55, 1e-15);
  EXPECT_NEAR(p(1.15), 0.55, 1e-15);
  EXPECT_NEAR(p(0.85), 0.3, 1e-15);
  for (int k = 1; k <= 4; ++k) {
    double c = 0.0, s = 0.0;
    const int m = 200000;
    for (int i = 0; i < m; ++i) {
      const double x = (i + 0.5) / m;
      c += p(x) * std::cos(2 * std::numbers::pi * k * x) / m;
      s += p(x) * std::sin(2 * std::numbers::pi * k * x) / m;
    }
    const auto [fc, fs] = p.fourier_moment(k);
    EXPECT_NEAR(fc, c, 1e-8);
    EXPECT_NEAR(fs, s, 1e-8);
  }
  const auto cosine = DensityProfile::cosine(0.5, 0.25, 1, 256);
  EXPECT_NEAR(cosine.fourier_moment(1).first, 0.125 * std::pow(std::sin(std::numbers::pi / 256) / (std::numbers::pi / 256), 2), 1e-14);
  EXPECT_NEAR(cosine.mass(), 0.5, 1e-14);
}

TEST(DensityProfileTest, CellAveragesAndRange) {
  const auto c = DensityProfile::constant(0.3);
  for (double a : c.cell_averages(7)) EXPECT_NEAR(a, 0.3, 1e-15);
  EXPECT_THROW(DensityProfile({{0.0, 1.2}}), std::invalid_argument);
  const auto lin = DensityProfile({{0.0, 0.0}, {0.5, 1.0}});
  EXPECT_NEAR(lin.cell_average(1, 4), 0.5, 1e-15);
  EXPECT_TRUE(DensityProfile::constant(0.5).is_interior(0.1));
  EXPECT_FALSE(lin.is_interior(0.1));
  const auto shifted = lin.shifted(0.25);
  EXPECT_NEAR(shifted(0.0), lin(0.25), 1e-15);
}

TEST(TentAverage, ConstantAndLinear) {
  EXPECT_NEAR(tent_average([](double) { return 0.7; }, 0.3, 10), 0.7, 1e-14);
  // Tent is symmetric, so a linear function averages to its centre value.
  EXPECT_NEAR(tent_average([](double y) { return 2 * y; }, 0.4, 10), 0.8, 1e-13);
}
