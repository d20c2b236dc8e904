#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "plevy/constants.hpp"
#include "plevy/error.hpp"

using namespace plevy;
constexpr double pi = std::numbers::pi;

namespace {

// Classical normalisation of the fractional Laplacian; p = 2 must reproduce it.
double classical_c(int d, double s) {
  return s * std::pow(4.0, s) * std::tgamma(0.5 * d + s) / (std::pow(pi, 0.5 * d) * std::tgamma(1.0 - s));
}

}  // namespace

TEST(LogGamma, KnownValues) {
  EXPECT_EQ(log_gamma(1.0), 0.0);
  EXPECT_NEAR(log_gamma(0.5), std::log(std::sqrt(pi)), 1e-15);
  // Gamma(5/2) = (3/4) sqrt(pi) by recurrence; 30-digit value 0.28468287047291915963...
  EXPECT_NEAR(log_gamma(2.5), std::log(0.75 * std::sqrt(pi)), 1e-15);
  EXPECT_NEAR(log_gamma(2.5), 0.284682870472919159632, 1e-15);
}

TEST(LogGamma, RejectsNonPositive) {
  EXPECT_THROW(log_gamma(0.0), Error);
  EXPECT_THROW(log_gamma(-1.5), Error);
}

TEST(LogGamma, RelativeAccuracyAgainstStd) {
  for (double x = 1e-3; x < 1e3; x *= 1.37) {
    const double ref = std::lgamma(x);
    EXPECT_NEAR(log_gamma(x), ref, 1e-13 * std::max(1.0, std::abs(ref))) << x;
  }
}

TEST(SphereArea, LowDimensions) {
  EXPECT_NEAR(sphere_area(1), 2.0, 1e-15);
  EXPECT_NEAR(sphere_area(2), 2.0 * pi, 1e-14);
  EXPECT_NEAR(sphere_area(3), 4.0 * pi, 1e-14);
  EXPECT_THROW(sphere_area(0), Error);
}

TEST(KConst, OneDimensionIsOne) {
  for (double p : {1.5, 2.0, 3.0, 4.0}) EXPECT_NEAR(k_const(ExponentDim(p, 1)), 1.0, 1e-14);
}

TEST(KConst, QuadraticIsInverseDimension) {
  EXPECT_NEAR(k_const(ExponentDim(2.0, 1)), 1.0, 1e-12);
  EXPECT_NEAR(k_const(ExponentDim(2.0, 2)), 0.5, 1e-12);
}

TEST(KConst, PlaneCubic) { EXPECT_NEAR(k_const(ExponentDim(3.0, 2)), 4.0 / (3.0 * pi), 1e-12); }

TEST(KConst, SphericalAverageByQuadrature) {
  // K_{2,p} = (1/2pi) int_0^{2pi} |cos t|^p dt
  for (double p : {1.5, 2.5, 4.0}) {
    const int n = 20000;
    double acc = 0.0;
    for (int i = 0; i < n; ++i) acc += std::pow(std::abs(std::cos((i + 0.5) * 2.0 * pi / n)), p);
    EXPECT_NEAR(k_const(ExponentDim(p, 2)), acc / n, 1e-9) << p;
  }
}

TEST(ExponentDim, RejectsInvalid) {
  EXPECT_THROW(ExponentDim(1.0, 1), Error);
  EXPECT_THROW(ExponentDim(2.0, 3), Error);
  EXPECT_NO_THROW(ExponentDim(2.0, 2));
  EXPECT_DOUBLE_EQ(ExponentDim(3.0, 1).conjugate(), 1.5);
}

TEST(CFrac, FrozenHighPrecisionValues) {
  // 30-digit evaluations of the cosine expression.
  EXPECT_NEAR(c_frac(ExponentDim(2.0, 1), 0.25), 0.199471140200716338970, 1e-14);
  EXPECT_NEAR(c_frac(ExponentDim(3.0, 2), 0.7), 0.289219313859927490981, 1e-14);
  EXPECT_NEAR(c_frac(ExponentDim(1.5, 1), 0.3), 0.209712685631088007797, 1e-14);
}

TEST(CFrac, BothExpressionsAgreeOnGrid) {
  for (int d : {1, 2})
    for (double p : {1.25, 1.5, 2.0, 3.0, 4.0})
      for (double s : {0.05, 0.3, 0.45, 0.7, 0.95}) {
        const ExponentDim pd(p, d);
        const double a = c_frac_gamma_form(pd, s), b = c_frac_cosine_form(pd, s);
        EXPECT_LE(std::abs(a - b), 1e-9 * std::abs(a)) << d << " " << p << " " << s;
      }
}

TEST(CFrac, QuadraticMatchesClassicalConstant) {
  for (int d : {1, 2})
    for (double s : {0.1, 0.25, 0.5, 0.75, 0.9})
      EXPECT_NEAR(c_frac(ExponentDim(2.0, d), s), classical_c(d, s), 1e-12 * classical_c(d, s)) << d << " " << s;
}

TEST(CFrac, HalfUsesGammaFormWithLimitOracle) {
  // (1-2s)/cos(s pi) -> 2/pi at s = 1/2, so the cosine form tends to 1/pi for d = 1, p = 2.
  EXPECT_NEAR(c_frac(ExponentDim(2.0, 1), 0.5), 1.0 / pi, 1e-14);
  EXPECT_THROW(c_frac_cosine_form(ExponentDim(2.0, 1), 0.5), Error);
  EXPECT_THROW(c_frac_cosine_form(ExponentDim(2.0, 1), 0.5005), Error);
  EXPECT_NEAR(c_frac_cosine_form(ExponentDim(2.0, 1), 0.5011) / c_frac_gamma_form(ExponentDim(2.0, 1), 0.5011), 1.0, 1e-12);
  EXPECT_NEAR(c_frac_cosine_form(ExponentDim(2.0, 1), 0.5011), 1.0 / pi, 1e-3);
}

TEST(CFrac, RangeErrorsNearEndpoints) {
  EXPECT_THROW(c_frac(ExponentDim(2.0, 1), 1e-5), Error);
  EXPECT_THROW(c_frac(ExponentDim(2.0, 1), 1.0), Error);
  EXPECT_NO_THROW(c_frac(ExponentDim(2.0, 1), 1e-4));
  EXPECT_NO_THROW(c_frac(ExponentDim(2.0, 1), 1.0 - 1e-4));
}

TEST(CTilde, Branches) {
  EXPECT_DOUBLE_EQ(c_tilde(ExponentDim(2.0, 1), 0.6), c_frac(ExponentDim(2.0, 1), 0.6));
  EXPECT_DOUBLE_EQ(c_tilde(ExponentDim(2.0, 1), 0.4), c_frac(ExponentDim(2.0, 1), 0.4));
  EXPECT_NEAR(c_tilde(ExponentDim(3.0, 2), 0.3), 0.146481437298287374765, 1e-14);
}

TEST(AScaling, Examples) {
  EXPECT_NEAR(a_scaling(ExponentDim(2.0, 1), 0.5), 0.25, 1e-15);
  EXPECT_NEAR(a_scaling(ExponentDim(2.0, 2), 0.5), 1.0 / (4.0 * pi), 1e-15);
  EXPECT_LT(a_scaling(ExponentDim(2.0, 1), 1e-9), 1e-8);
  EXPECT_THROW(a_scaling(ExponentDim(2.0, 1), 0.0), Error);
  EXPECT_THROW(a_scaling(ExponentDim(2.0, 1), 1.0), Error);
}

TEST(Asymptotics, RatiosApproachTwoPOverSphere) {
  for (int d : {1, 2})
    for (double p : {1.5, 2.0, 3.0, 4.0}) {
      const ExponentDim pd(p, d);
      const double target = 2.0 * p / sphere_area(d);
      auto dev = [&](auto ratio, double s) { return std::abs(ratio(s) / target - 1.0); };
      auto r1 = [&](double s) { return k_const(pd) * c_frac(pd, s) / (s * (1.0 - s)); };
      auto r2 = [&](double s) { return std::tgamma(p + 1.0) * c_frac(pd, s) / (s * (1.0 - s)); };
      auto r3 = [&](double s) { return 2.0 * c_frac(ExponentDim(2.0, d), 0.5 * s * p) / (s * (1.0 - s)); };
      EXPECT_LT(dev(r1, 0.9999), dev(r1, 0.999));
      EXPECT_LT(dev(r1, 0.9999), 2e-4);
      EXPECT_LT(dev(r2, 1e-4), dev(r2, 1e-3));
      EXPECT_LT(dev(r2, 1e-4), 1e-3);
      EXPECT_LT(dev(r3, 2e-4), dev(r3, 2e-3));
      EXPECT_LT(dev(r3, 2e-4), 4e-4);
    }
}

TEST(Asymptotics, FractionalScalingTendsToHalfK) {
  // a / C~_{1-eps} -> K/2; the operator carries the factor 2 of its principal value.
  for (int d : {1, 2})
    for (double p : {1.5, 2.0, 3.0}) {
      const ExponentDim pd(p, d);
      const double r = a_scaling(pd, 1e-4) / c_tilde(pd, 1.0 - 1e-4);
      EXPECT_NEAR(2.0 * r / k_const(pd), 1.0, 2e-4);
    }
}
