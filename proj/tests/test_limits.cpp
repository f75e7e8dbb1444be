#include <gtest/gtest.h>

#include <cmath>

#include "diamlab/angular_density.hpp"
#include "diamlab/errors.hpp"
#include "diamlab/limits.hpp"

using namespace diamlab;

TEST(LogGamma, Examples) {
  EXPECT_NEAR(log_gamma(1.0), 0.0, 1e-14);
  EXPECT_NEAR(log_gamma(0.5), 0.5 * std::log(kPi), 1e-14);
  EXPECT_NEAR(log_gamma(0.5), 0.5723649429, 1e-10);
  EXPECT_NEAR(log_gamma(6.0), std::log(120.0), 1e-13);
}

TEST(LogGamma, MatchesStdLgammaOnRange) {
  double worst = 0;
  for (int k = 0; k <= 4950; ++k) {
    const double x = 0.5 + 0.01 * k;
    worst = std::max(worst, std::abs(log_gamma(x) - std::lgamma(x)));
  }
  EXPECT_LT(worst, 1e-13);
}

TEST(LogGamma, SmallArgumentsAndErrors) {
  EXPECT_NEAR(log_gamma(0.1), std::lgamma(0.1), 1e-13);
  EXPECT_NEAR(log_gamma(1e-3), std::lgamma(1e-3), 1e-12);
  EXPECT_THROW(log_gamma(0.0), DomainError);
  EXPECT_THROW(log_gamma(-1.5), DomainError);
}

TEST(IncompleteBeta, KnownValues) {
  EXPECT_NEAR(regularized_incomplete_beta(1, 1, 0.3), 0.3, 1e-14);
  EXPECT_NEAR(regularized_incomplete_beta(2, 3, 0.4), 0.5248, 1e-13);
  EXPECT_NEAR(regularized_incomplete_beta(0.5, 0.5, 0.5), 0.5, 1e-13);
  EXPECT_EQ(regularized_incomplete_beta(3, 4, 0.0), 0.0);
  EXPECT_EQ(regularized_incomplete_beta(3, 4, 1.0), 1.0);
}

TEST(CapArea, AnalyticFractions) {
  // d = 3: (1 - cos theta) / 2;  d = 2: theta / pi.
  for (double th : {0.1, 0.5, kPi / 3, 1.2, kPi / 2, 2.0, 3.0, kPi}) {
    EXPECT_NEAR(cap_area_fraction(3, th), 0.5 * (1 - std::cos(th)), 1e-13) << th;
    EXPECT_NEAR(cap_area_fraction(2, th), th / kPi, 1e-13) << th;
  }
  EXPECT_EQ(cap_area_fraction(5, 0.0), 0.0);
  EXPECT_THROW(cap_area_fraction(3, -0.1), DomainError);
}

TEST(GammaExponent, Examples) {
  EXPECT_DOUBLE_EQ(gamma_exponent(2, 1), 2.5);
  EXPECT_DOUBLE_EQ(2.0 / gamma_exponent(2, 1), 0.8);
  EXPECT_DOUBLE_EQ(gamma_exponent(4, 1), 3.5);
  EXPECT_DOUBLE_EQ(gamma_exponent(3, 0), 1.0);
  EXPECT_THROW(gamma_exponent(1, 1), DomainError);
}

TEST(ZetaTailConstant, Examples) {
  EXPECT_NEAR(zeta_tail_constant(2), 2 / kPi, 1e-14);
  EXPECT_NEAR(zeta_tail_constant(3), 1.0, 1e-14);
  for (int d = 2; d <= 10; ++d) EXPECT_NEAR(zeta_tail_constant(d), uniform_sphere_constant(d), 1e-12) << d;
}

TEST(Sigma0Spherical, UniformBallClosedForm) {
  for (int d = 2; d <= 10; ++d) {
    EXPECT_NEAR(sigma0_spherical(d, 1.0, d, false), uniform_ball_constant(d), 1e-12) << d;
  }
  EXPECT_NEAR(sigma0_spherical(2, 1.0, 2.0, false), 32 / (15 * kPi), 1e-14);
  EXPECT_NEAR(0.5 * sigma0_spherical(2, 1.0, 2.0, false), 16 / (15 * kPi), 1e-14);
}

TEST(Sigma0Spherical, BoundaryAtom) {
  for (int d = 2; d <= 7; ++d) EXPECT_DOUBLE_EQ(sigma0_spherical(d, 0.0, 1.0, true), zeta_tail_constant(d));
  EXPECT_NEAR(sigma0_spherical(3, 0.0, 0.5, true), 0.25, 1e-14);
}

TEST(Sigma0Spherical, Errors) {
  EXPECT_THROW(sigma0_spherical(3, 0.0, 1.0, false), DomainError);
  EXPECT_THROW(sigma0_spherical(3, 1.0, 0.0, false), DomainError);
}

TEST(Sigma0Spherical, HalfIntegerAlphaByHand) {
  // d = 3, alpha = 1/2, a = 1: c = 1, Gamma(1/2)^2 = pi, Gamma(2)/Gamma(3) = 1/2.
  EXPECT_NEAR(sigma0_spherical(3, 0.5, 1.0, false), 0.25 * kPi * 0.5, 1e-13);
}

TEST(Sigma0Sector, FullSphereAndCaps) {
  for (int d : {2, 3, 5}) {
    EXPECT_NEAR(sigma0_sector(d, 1.0, d, kPi), sigma0_spherical(d, 1.0, d, false), 1e-13) << d;
  }
  // Double cone over a cap covering fraction q of the sphere: the base law
  // conditioned on it has density 1/(2q) times the original near the rim.
  EXPECT_NEAR(cap_area_fraction(2, kPi / 2), 0.5, 1e-14);
  EXPECT_NEAR(sector_sigma0_factor(2, kPi / 2), 1.0, 1e-13);
  EXPECT_NEAR(cap_area_fraction(3, kPi / 3), 0.25, 1e-14);
  EXPECT_NEAR(sigma0_sector(3, 0.0, 1.0, kPi / 3), 2.0 * zeta_tail_constant(3), 1e-13);
  EXPECT_NEAR(sigma0_sector(3, 0.0, 1.0, kPi / 4), 1.0 / (1.0 - std::cos(kPi / 4)), 1e-12);
  EXPECT_THROW(sigma0_sector(3, 1.0, 3.0, 0.0), DomainError);
}

TEST(Sigma0Circle, Examples) {
  EXPECT_NEAR(sigma0_circle_density([](double) { return 1 / (2 * kPi); }), 2 / kPi, 1e-12);
  EXPECT_NEAR(sigma0_circle_density(AngularDensity::uniform()), 2 / kPi, 1e-12);
  EXPECT_NEAR(sigma0_circle_density([](double u) { return u < kPi ? 1 / kPi : 0.0; }), 0.0, 1e-15);
  EXPECT_NEAR(sigma0_circle_density([](double u) { return (1 + std::cos(u)) / (2 * kPi); }), 1 / kPi, 1e-12);
  EXPECT_NEAR(sigma0_circle_density(AngularDensity::cosine_mix({1.0, 0.0})), 1 / kPi, 1e-12);
}

TEST(Sigma0Circle, SecondHarmonicSurvivesAntipodalProduct) {
  // f = (1 + b cos 2u) / 2pi: f(u) f(u+pi) = f(u)^2, 4 int f^2 = (2/pi)(1 + b^2/2).
  const double b = 0.6;
  EXPECT_NEAR(sigma0_circle_density(AngularDensity::cosine_mix({0.0, 0.0, b, 0.3})), (2 / kPi) * (1 + b * b / 2),
              1e-12);
}

TEST(Sigma0Circle, NegativeDensityThrows) {
  EXPECT_THROW(sigma0_circle_density([](double u) { return std::cos(u); }), DomainError);
}

TEST(LimitCdf, Examples) {
  const LimitLaw d2 = ContinuousLaw{2.5, 32 / (15 * kPi)};
  const LimitLaw seg1 = SegmentsLaw{{1.0}};
  const LimitLaw zeta = SegmentsZetaLaw{};
  for (const auto* law : {&d2, &seg1, &zeta}) EXPECT_EQ(limit_cdf(*law, 0.0), 0.0);
  EXPECT_NEAR(limit_cdf(d2, 1.0), 1 - std::exp(-16 / (15 * kPi)), 1e-15);
  EXPECT_NEAR(limit_cdf(d2, 1.0), 0.28788, 5e-5);
  EXPECT_NEAR(limit_cdf(seg1, 2.0), 1 - 2 * std::exp(-1.0), 1e-15);
  EXPECT_NEAR(limit_cdf(seg1, 2.0), 0.26424, 5e-6);
  EXPECT_THROW(limit_cdf(d2, -1e-3), DomainError);
}

TEST(LimitCdf, ZetaClosedForm) {
  for (double t : {1e-12, 1e-9, 1e-6, 0.01, 0.5, 1.0, 3.0, 10.0, 50.0}) {
    const double x = std::sqrt(3 * t);
    const double expected = 1 - std::exp(-t / 2) * std::sinh(x) / x;
    EXPECT_NEAR(limit_cdf(SegmentsZetaLaw{}, t), expected, 1e-12) << t;
    // Original parameterisation through zeta(2).
    const double z = std::sqrt(2 * kZeta2 / t) * std::sinh(kPi * std::sqrt(t / (2 * kZeta2))) / kPi;
    EXPECT_NEAR(limit_cdf(SegmentsZetaLaw{}, t), 1 - std::exp(-t / 2) * z, 1e-12) << t;
  }
}

TEST(LimitCdf, ZetaMatchesTruncatedProduct) {
  const LimitLaw product = zeta_segments(10000);
  EXPECT_LT(zeta_segments_tail_mass(10000), 6.1e-5);
  EXPECT_GT(zeta_segments_tail_mass(10000), 6.0e-5);
  for (double t = 0; t <= 20; t += 0.5) {
    // Dropped mass q shifts the product by at most a factor e^{t q / 2}.
    EXPECT_NEAR(limit_cdf(product, t), limit_cdf(SegmentsZetaLaw{}, t), 1e-4) << t;
  }
}

TEST(LimitCdf, NondecreasingAndBounded) {
  const std::vector<LimitLaw> laws = {ContinuousLaw{2.5, 0.679}, ContinuousLaw{0.5, 2 / kPi},
                                      ContinuousLaw{1.0, 1.0},  SegmentsLaw{{0.5, 0.5}},
                                      SegmentsLaw{{0.2, 0.3, 0.5}}, SegmentsZetaLaw{}};
  for (const auto& law : laws) {
    double prev = 0;
    for (int k = 0; k <= 10000; ++k) {
      const double f = limit_cdf(law, 100.0 * k / 10000);
      ASSERT_GE(f, prev) << describe(law) << " k=" << k;
      ASSERT_LE(f, 1.0);
      prev = f;
    }
  }
  for (const auto& law : laws) {
    const auto* c = std::get_if<ContinuousLaw>(&law);
    if (c && c->gamma >= 1) {
      EXPECT_NEAR(limit_cdf(law, 1e3), 1.0, 1e-6);
    }
  }
  // gamma = 1/2 has a slow tail: 1 - F(1000) = exp(-sqrt(1000) / pi) ~ 4e-5.
  EXPECT_NEAR(1 - limit_cdf(ContinuousLaw{0.5, 2 / kPi}, 1e3), std::exp(-std::sqrt(1e3) / kPi), 1e-15);
  EXPECT_NEAR(limit_cdf(SegmentsZetaLaw{}, 1e3), 1.0, 1e-6);
}

TEST(LimitCdf, InvalidParameters) {
  EXPECT_THROW(limit_cdf(ContinuousLaw{0.0, 1.0}, 1.0), DomainError);
  EXPECT_THROW(limit_cdf(ContinuousLaw{1.0, -1.0}, 1.0), DomainError);
  EXPECT_THROW(limit_cdf(SegmentsLaw{{0.7, 0.7}}, 1.0), DomainError);
  EXPECT_THROW(limit_cdf(SegmentsLaw{{-0.1, 1.1}}, 1.0), DomainError);
  EXPECT_THROW(limit_cdf(SegmentsLaw{{}}, 1.0), DomainError);
}

TEST(LawGamma, PerKind) {
  EXPECT_EQ(law_gamma(ContinuousLaw{2.5, 1.0}), 2.5);
  EXPECT_EQ(law_gamma(SegmentsLaw{{1.0}}), 2.0);
  EXPECT_EQ(law_gamma(SegmentsZetaLaw{}), 2.0);
}

TEST(Envelope, BracketsPlanarLaw) {
  const LimitLaw d2 = ContinuousLaw{gamma_exponent(2, 1), sigma0_spherical(2, 1, 2, false)};
  for (int k = 1; k <= 50; ++k) {
    const double t = 0.1 * k;
    const Envelope e = aprs_envelope(t);
    EXPECT_LT(e.lower, e.upper) << t;
    EXPECT_LE(e.lower, limit_cdf(d2, t)) << t;
    EXPECT_LE(limit_cdf(d2, t), e.upper) << t;
  }
  const Envelope tiny = aprs_envelope(1e-8);
  EXPECT_LT(tiny.upper, 1e-19);
  EXPECT_EQ(aprs_envelope(0.0).lower, 0.0);
  EXPECT_THROW(aprs_envelope(-1.0), DomainError);
}
