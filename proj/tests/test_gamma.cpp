#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "fstefan/gamma.hpp"

using fstefan::gamma_fn;

TEST(Gamma, KnownValues) {
  EXPECT_NEAR(gamma_fn(1.0), 1.0, 1e-14);
  EXPECT_NEAR(gamma_fn(0.5), std::sqrt(std::numbers::pi), 1e-13);
  EXPECT_NEAR(gamma_fn(2.5), 1.3293403881791355, 1e-13);
  EXPECT_NEAR(gamma_fn(5.0), 24.0, 1e-12);
}

TEST(Gamma, MatchesStdTgammaOnRange) {
  for (double x = 0.01; x < 12.0; x += 0.0137) {
    EXPECT_NEAR(gamma_fn(x) / std::tgamma(x), 1.0, 1e-13) << "x=" << x;
  }
}

TEST(Gamma, Recurrence) {
  for (double x = 0.05; x < 6.0; x += 0.1) {
    EXPECT_NEAR(gamma_fn(x + 1.0) / (x * gamma_fn(x)), 1.0, 1e-13);
  }
}

TEST(Gamma, ReflectionIdentity) {
  for (double x = 0.05; x < 1.0; x += 0.05) {
    const double lhs = gamma_fn(x) * gamma_fn(1.0 - x);
    EXPECT_NEAR(lhs * std::sin(std::numbers::pi * x) / std::numbers::pi, 1.0, 1e-13);
  }
}

TEST(Gamma, DuplicationIdentity) {
  for (double x = 0.1; x < 4.0; x += 0.3) {
    const double lhs = gamma_fn(x) * gamma_fn(x + 0.5);
    const double rhs = std::pow(2.0, 1.0 - 2.0 * x) * std::sqrt(std::numbers::pi) * gamma_fn(2.0 * x);
    EXPECT_NEAR(lhs / rhs, 1.0, 1e-13);
  }
}

TEST(Gamma, RejectsNonPositive) {
  EXPECT_THROW(gamma_fn(0.0), std::domain_error);
  EXPECT_THROW(gamma_fn(-1.5), std::domain_error);
}
