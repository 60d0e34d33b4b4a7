#include "localfrac/specfun.hpp"

#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

using namespace localfrac;
using specfun::SeriesConfig;

namespace {

// ---------------------------------------------------------------------------
// Test-only oracles.  These are independent of the library paths they check.
// ---------------------------------------------------------------------------

// Gamma(x) = 2 * int_0^inf u^{2x-1} e^{-u^2} du  (substitution s = u^2),
// composite Simpson on [0, 9].  For x >= 0.5 the integrand is smooth, the
// truncated tail is below 1e-33.
double gamma_integral_oracle(double x) {
  const double hi = 9.0;
  const int n = 600000;  // even
  const double h = hi / n;
  auto f = [x](double u) {
    return u == 0.0 ? (2.0 * x - 1.0 == 0.0 ? 1.0 : 0.0)
                    : std::pow(u, 2.0 * x - 1.0) * std::exp(-u * u);
  };
  double s = f(0.0) + f(hi);
  for (int i = 1; i < n; ++i) s += f(i * h) * (i % 2 ? 4.0 : 2.0);
  return 2.0 * s * h / 3.0;
}

// Direct, unguarded summation of E_{a,b}(z) with std::tgamma only.
double mittag_leffler_brute(double a, double b, double z, int terms = 400) {
  double sum = 0.0;
  double zk = 1.0;
  for (int k = 0; k < terms; ++k) {
    const double arg = a * k + b;
    if (!(arg <= 0.0 && arg == std::floor(arg))) sum += zk / std::tgamma(arg);
    zk *= z;
  }
  return sum;
}

double rel_err(double got, double want) {
  return std::abs(got - want) / std::max(1e-300, std::abs(want));
}

// Deterministic uniform in [lo, hi) from raw mt19937_64 bits.
struct Uniform {
  std::mt19937_64 rng;
  explicit Uniform(std::uint64_t seed) : rng(seed) {}
  double operator()(double lo, double hi) {
    const double u = (rng() >> 11) * 0x1.0p-53;
    return lo + u * (hi - lo);
  }
};

}  // namespace

TEST(Gamma, SmallIntegerFactorials) {
  EXPECT_DOUBLE_EQ(specfun::gamma(1.0), 1.0);
  EXPECT_NEAR(rel_err(specfun::gamma(5.0), 24.0), 0.0, 1e-13);
  EXPECT_NEAR(rel_err(specfun::gamma(10.0), 362880.0), 0.0, 1e-13);
}

TEST(Gamma, HalfIntegerMatchesIntegralOracle) {
  const double oracle = gamma_integral_oracle(0.5);
  // the oracle itself must reproduce the sqrt(pi) identity
  ASSERT_NEAR(rel_err(oracle, std::sqrt(std::numbers::pi)), 0.0, 1e-12);
  EXPECT_NEAR(rel_err(specfun::gamma(0.5), oracle), 0.0, 1e-12);
  EXPECT_NEAR(specfun::gamma(0.5), 1.7724538509055160, 1e-12);

  EXPECT_NEAR(rel_err(specfun::gamma(1.5), gamma_integral_oracle(1.5)), 0.0, 1e-12);
  EXPECT_NEAR(rel_err(specfun::gamma(5.0), gamma_integral_oracle(5.0)), 0.0, 1e-11);
}

TEST(Gamma, RecurrenceOnWideRange) {
  Uniform u(20240617);
  for (int i = 0; i < 400; ++i) {
    const double x = u(0.1, 50.0);
    const double lhs = specfun::gamma(x + 1.0);
    const double rhs = x * specfun::gamma(x);
    EXPECT_NEAR(rel_err(lhs, rhs), 0.0, 1e-10) << "x = " << x;
  }
}

TEST(Gamma, ReflectionForNegativeArguments) {
  // Gamma(-0.5) = -2 sqrt(pi)
  EXPECT_NEAR(rel_err(specfun::gamma(-0.5), -2.0 * std::sqrt(std::numbers::pi)), 0.0,
              1e-12);
  // recurrence across the negative axis
  EXPECT_NEAR(rel_err(specfun::gamma(-1.5), specfun::gamma(-0.5) / -1.5), 0.0, 1e-12);
}

TEST(Gamma, PolesAndOverflowAreErrors) {
  EXPECT_THROW(specfun::gamma(0.0), PoleError);
  EXPECT_THROW(specfun::gamma(-1.0), PoleError);
  EXPECT_THROW(specfun::gamma(-42.0), PoleError);
  EXPECT_THROW(specfun::gamma(172.0), OverflowError);
  EXPECT_NO_THROW(specfun::gamma(170.0));
}

TEST(Gamma, LargeArgumentsStayAccurate) {
  // Gamma(170) via the recurrence chain down to Gamma(10), checked against
  // the direct computation.
  double chain = specfun::gamma(10.0);
  for (int k = 10; k < 170; ++k) chain *= k;
  EXPECT_NEAR(rel_err(specfun::gamma(170.0), chain), 0.0, 1e-11);
}

TEST(MittagLeffler, ExpIdentityAtOne) {
  EXPECT_NEAR(rel_err(specfun::mittag_leffler(1.0, 1.0, 1.0), std::exp(1.0)), 0.0,
              1e-13);
}

TEST(MittagLeffler, E12OfTwoMatchesClosedForm) {
  // E_{1,2}(z) = (e^z - 1)/z; cross-checked with the brute-force series.
  const double closed = (std::exp(2.0) - 1.0) / 2.0;
  ASSERT_NEAR(rel_err(mittag_leffler_brute(1.0, 2.0, 2.0), closed), 0.0, 1e-12);
  EXPECT_NEAR(rel_err(specfun::mittag_leffler(1.0, 2.0, 2.0), closed), 0.0, 1e-12);
  EXPECT_NEAR(specfun::mittag_leffler(1.0, 2.0, 2.0), 3.194528049465325, 1e-12);
}

TEST(MittagLeffler, E22OfOneIsSinh) {
  const double want = std::sinh(1.0);
  ASSERT_NEAR(rel_err(mittag_leffler_brute(2.0, 2.0, 1.0), want), 0.0, 1e-12);
  EXPECT_NEAR(rel_err(specfun::mittag_leffler(2.0, 2.0, 1.0), want), 0.0, 1e-12);
  EXPECT_NEAR(specfun::mittag_leffler(2.0, 2.0, 1.0), 1.1752011936438014, 1e-12);
}

TEST(MittagLeffler, MatchesExpOverSafeWindow) {
  for (double z = -5.0; z <= 50.0; z += 0.25) {
    const double want = std::exp(z);
    EXPECT_NEAR(rel_err(specfun::mittag_leffler(1.0, 1.0, z), want), 0.0, 1e-10)
        << "z = " << z;
  }
}

TEST(MittagLeffler, HyperbolicIdentities) {
  for (double z = 0.1; z <= 3.0; z += 0.1) {
    const double z2 = z * z;
    EXPECT_NEAR(rel_err(specfun::mittag_leffler(2.0, 1.0, z2), std::cosh(z)), 0.0, 1e-9);
    EXPECT_NEAR(rel_err(specfun::mittag_leffler(2.0, 2.0, z2), std::sinh(z) / z), 0.0,
                1e-9);
  }
}

TEST(MittagLeffler, RefusesArgumentsOutsideSafeBound) {
  EXPECT_THROW(specfun::mittag_leffler(1.0, 1.0, 50.5), ConvergenceError);
  EXPECT_THROW(specfun::mittag_leffler(0.5, 1.0, 10.5), ConvergenceError);
  EXPECT_THROW(specfun::mittag_leffler(0.5, 1.0, 1e9), ConvergenceError);
  EXPECT_NO_THROW(specfun::mittag_leffler(0.5, 1.0, 10.0));
}

TEST(MittagLeffler, MaxTermsExhaustionIsAnError) {
  SeriesConfig cfg;
  cfg.max_terms = 3;
  EXPECT_THROW(specfun::mittag_leffler(1.0, 1.0, 5.0, cfg), ConvergenceError);
}

TEST(MittagLeffler, InvalidConfigAndParameters) {
  SeriesConfig bad;
  bad.tol = 0.0;
  EXPECT_THROW(specfun::mittag_leffler(1.0, 1.0, 1.0, bad), DomainError);
  EXPECT_THROW(specfun::mittag_leffler(0.0, 1.0, 1.0), DomainError);
  EXPECT_THROW(specfun::mittag_leffler(-1.0, 1.0, 1.0), DomainError);
}

TEST(MittagLeffler, DeterministicBitwise) {
  const double a = specfun::mittag_leffler(0.7, 1.3, 4.2);
  const double b = specfun::mittag_leffler(0.7, 1.3, 4.2);
  EXPECT_EQ(std::bit_cast<std::uint64_t>(a), std::bit_cast<std::uint64_t>(b));
}

TEST(MellinRoss, KnownValues) {
  // E_t(1, 1) at t=1 equals E_{1,2}(1) = e - 1
  const double want = std::exp(1.0) - 1.0;
  ASSERT_NEAR(rel_err(mittag_leffler_brute(1.0, 2.0, 1.0), want), 0.0, 1e-12);
  EXPECT_NEAR(rel_err(specfun::mellin_ross(1.0, 1.0, 1.0), want), 0.0, 1e-12);

  // a = 0 keeps only the k = 0 term: t^alpha / Gamma(alpha + 1)
  EXPECT_NEAR(rel_err(specfun::mellin_ross(0.5, 0.0, 1.0), 1.0 / specfun::gamma(1.5)),
              0.0, 1e-13);
  EXPECT_NEAR(specfun::mellin_ross(0.5, 0.0, 1.0), 1.1283791670955126, 1e-10);

  // the t^alpha factor sends the function to 0 with t
  EXPECT_NEAR(specfun::mellin_ross(0.5, 1.0, 1e-14), 0.0, 1e-6);
}

TEST(Robotov, KnownValues) {
  // R_1(1, 1) = E_{2,2}(1) = sinh(1)
  EXPECT_NEAR(rel_err(specfun::robotov(1.0, 1.0, 1.0), std::sinh(1.0)), 0.0, 1e-12);
  // beta = 0 keeps only the k = 0 term
  EXPECT_NEAR(rel_err(specfun::robotov(0.5, 0.0, 4.0), 2.0 / specfun::gamma(1.5)), 0.0,
              1e-13);
  EXPECT_NEAR(specfun::robotov(0.5, 0.0, 4.0), 2.2567583341910251, 1e-10);
  EXPECT_NEAR(specfun::robotov(0.7, 2.0, 1e-14), 0.0, 1e-9);
}

TEST(Robotov, DomainChecks) {
  EXPECT_THROW(specfun::robotov(0.5, 1.0, 0.0), DomainError);
  EXPECT_THROW(specfun::robotov(0.0, 1.0, 1.0), DomainError);
  EXPECT_THROW(specfun::mellin_ross(1.5, 1.0, 1.0), DomainError);
  EXPECT_THROW(specfun::mellin_ross(0.5, 1.0, -2.0), DomainError);
}
