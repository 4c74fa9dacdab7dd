#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "fstefan/manufactured.hpp"
#include "oracles.hpp"

using namespace fstefan;

namespace {

// Central second difference, accurate to ~1e-7 for these smooth profiles.
double second_x(const ManufacturedCase& mc, double x, double t) {
  const double h = 1e-4;
  return (mc.temperature(x + h, t) - 2.0 * mc.temperature(x, t) + mc.temperature(x - h, t)) / (h * h);
}

double time_derivative(const ManufacturedCase& mc, double x, double t) {
  const double h = 1e-6;
  return (mc.temperature(x, t + h) - mc.temperature(x, t - h)) / (2.0 * h);
}

double gradient_x(const ManufacturedCase& mc, double x, double t) {
  const double h = 1e-6;
  return (mc.temperature(x + h, t) - mc.temperature(x - h, t)) / (2.0 * h);
}

double crossing_time(const ManufacturedCase& mc, double x) {
  if (x <= mc.s0) return 0.0;
  double lo = 0.0, hi = 10.0;
  for (int k = 0; k < 200; ++k) {
    const double mid = 0.5 * (lo + hi);
    (mc.front(mid) < x ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// C D^beta T - T_xx + (t - s^{-1}(x))^{-beta} / G(1-beta) by quadrature.
double strong_residual(const ManufacturedCase& mc, double x, double t) {
  const double tau = crossing_time(mc, x);
  const auto dt = [&](double s) { return s <= tau ? 0.0 : time_derivative(mc, x, s); };
  double r = oracle::caputo(dt, mc.beta, t, tau) - second_x(mc, x, t);
  if (x > mc.s0) r += std::pow(t - tau, -mc.beta) / std::tgamma(1.0 - mc.beta);
  return r;
}

// Simpson on each piece between the given breakpoints (E and F jump there).
double piecewise_simpson(const std::function<double(double)>& f, double a, double b, std::vector<double> cuts) {
  std::vector<double> pts{a};
  std::sort(cuts.begin(), cuts.end());
  for (const double c : cuts) {
    if (c > a && c < b) pts.push_back(c);
  }
  pts.push_back(b);
  double acc = 0.0;
  // Endpoints pulled in slightly so each piece sees only its own one-sided values.
  const double in = 1e-12;
  for (std::size_t k = 0; k + 1 < pts.size(); ++k) acc += oracle::simpson(f, pts[k] + in, pts[k + 1] - in, 4000);
  return acc;
}

// int [E(t) - E(0)] dx - [J(xr) - J(xl)] with J = I^beta T_x from the crossing time.
double cumulative_by_quadrature(const ManufacturedCase& mc, double xl, double xr, double t) {
  auto enthalpy = [&](double x, double tt) {
    if (mc.data.pin_front) return x < mc.s0 ? mc.temperature(x, tt) + 1.0 : 0.0;
    return x < mc.front(tt) ? mc.temperature(x, tt) + 1.0 : 0.0;
  };
  auto memory = [&](double x) {
    if (!mc.data.pin_front && x >= mc.front(t)) return 0.0;
    if (mc.data.pin_front && x >= mc.s0) return 0.0;
    const double tau = crossing_time(mc, x);
    return oracle::frac_integral([&](double s) { return gradient_x(mc, x, s); }, mc.beta, t, tau);
  };
  const double gain = piecewise_simpson([&](double x) { return enthalpy(x, t) - enthalpy(x, 0.0); }, xl, xr,
                                        {mc.s0, mc.front(t)});
  return gain - (memory(xr) - memory(xl));
}

}  // namespace

TEST(Manufactured, UnknownCaseRejected) {
  EXPECT_THROW(manufactured_case("spherical-front"), UnknownCaseError);
  EXPECT_THROW(manufactured_case("frozen-front", 1.0), std::domain_error);
}

TEST(Manufactured, FrozenFrontClosedForms) {
  const ManufacturedCase mc = manufactured_case("frozen-front", 0.5);
  EXPECT_TRUE(mc.data.pin_front);
  const double k = std::numbers::pi / 2.0;
  EXPECT_DOUBLE_EQ(mc.temperature(0.3, 0.5), std::cos(k * 0.3) * 1.25);
  EXPECT_EQ(mc.temperature(1.2, 0.5), 0.0);
  EXPECT_DOUBLE_EQ(mc.front(0.7), 1.0);
}

TEST(Manufactured, FrozenFrontForcingMatchesQuadrature) {
  for (double beta : {0.3, 0.5, 0.8}) {
    const ManufacturedCase mc = manufactured_case("frozen-front", beta);
    for (double x : {0.1, 0.45, 0.9}) {
      for (double t : {0.25, 0.8}) {
        EXPECT_NEAR(mc.data.strong_forcing(x, t), strong_residual(mc, x, t), 1e-5)
            << "beta=" << beta << " x=" << x << " t=" << t;
      }
    }
  }
}

TEST(Manufactured, FrozenFrontCumulativeSourceMatchesQuadrature) {
  const ManufacturedCase mc = manufactured_case("frozen-front", 0.5);
  for (auto [xl, xr] : {std::pair{0.0, 0.4}, std::pair{0.2, 0.7}}) {
    EXPECT_NEAR(mc.data.cumulative_source(xl, xr, 0.6), cumulative_by_quadrature(mc, xl, xr, 0.6), 1e-6);
  }
}

TEST(Manufactured, QuadraticFrontClosedForms) {
  const ManufacturedCase mc = manufactured_case("quadratic-front", 0.5);
  EXPECT_DOUBLE_EQ(mc.front(1.0), 1.0);
  EXPECT_DOUBLE_EQ(mc.temperature(0.25, 1.0), 0.5625);
  EXPECT_EQ(mc.temperature(1.0, 1.0), 0.0);
  EXPECT_DOUBLE_EQ(mc.data.boundary(1.0), 1.0);
}

TEST(Manufactured, QuadraticFrontForcingMatchesQuadrature) {
  for (double beta : {0.4, 0.6}) {
    const ManufacturedCase mc = manufactured_case("quadratic-front", beta);
    for (double x : {0.2, 0.45, 0.6, 0.8}) {
      const double t = 0.9;
      EXPECT_NEAR(mc.data.strong_forcing(x, t), strong_residual(mc, x, t), 1e-5)
          << "beta=" << beta << " x=" << x;
    }
  }
}

TEST(Manufactured, QuadraticFrontCumulativeSourceMatchesQuadrature) {
  const ManufacturedCase mc = manufactured_case("quadratic-front", 0.5);
  for (auto [xl, xr] : {std::pair{0.1, 0.4}, std::pair{0.3, 0.7}, std::pair{0.55, 0.9}}) {
    EXPECT_NEAR(mc.data.cumulative_source(xl, xr, 0.8), cumulative_by_quadrature(mc, xl, xr, 0.8), 2e-6)
        << xl << "," << xr;
  }
}

TEST(Manufactured, ForcingIntegralsMatchQuadrature) {
  for (const char* id : {"frozen-front", "quadratic-front"}) {
    const ManufacturedCase mc = manufactured_case(id, 0.5);
    const double t = 0.7;
    const double xr = std::min(mc.front(t), mc.s0 + 0.3) - 0.02;
    const double quad =
        piecewise_simpson([&](double x) { return mc.data.strong_forcing(x, t); }, 0.05, xr, {mc.s0});
    EXPECT_NEAR(mc.data.strong_forcing_integral(0.05, xr, t), quad, 1e-6) << id;
  }
}

TEST(Manufactured, SampledTrajectoryIsConsistent) {
  const ManufacturedCase mc = manufactured_case("quadratic-front", 0.5);
  const SolutionRecord rec = sample_case(mc, mc.params(30, 20));
  ASSERT_EQ(rec.last(), 20u);
  for (std::size_t n = 0; n <= rec.last(); ++n) {
    EXPECT_DOUBLE_EQ(rec.path.position(n), mc.front(rec.grid[n]));
    const FrontLocation f = rec.fronts[n];
    for (std::size_t i = f.cell; i < rec.space.cells; ++i) EXPECT_EQ(rec.temperature[n][i], 0.0);
    EXPECT_EQ(temperature_from_enthalpy(rec.enthalpy[n]).front, f);
  }
}

TEST(Manufactured, FrozenFrontSolverConvergesFirstOrder) {
  const ManufacturedCase mc = manufactured_case("frozen-front", 0.5);
  double prev = 0.0;
  for (std::size_t nx : {20, 40, 80}) {
    const SolutionRecord rec = run(mc.params(nx, 2 * nx), mc.data);
    double err = 0.0;
    for (std::size_t i = 0; i < nx / 2; ++i) {
      err = std::max(err, std::abs(rec.temperature.back()[i] - mc.temperature(rec.space.center(i), 1.0)));
    }
    if (prev > 0.0) {
      EXPECT_GT(prev / err, 1.8) << "nx=" << nx;
    }
    prev = err;
  }
}
