#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "fstefan/manufactured.hpp"
#include "fstefan/pipeline.hpp"
#include "fstefan/verify.hpp"

using namespace fstefan;

namespace {

ModelParams melt(double beta, std::size_t nx, std::size_t nt) {
  ModelParams p;
  p.beta = beta;
  p.length = 1.0;
  p.x0 = 0.25;
  p.nx = nx;
  p.nt = nt;
  p.bc_value = 0.5;
  p.t0_kind = InitialKind::linear;
  p.t0_value = 0.5;
  return p;
}

SolutionRecord zero_run() {
  ModelParams p;
  p.x0 = 0.5;
  p.nx = 20;
  p.nt = 10;
  p.bc_value = 0.0;
  return run(p);
}

}  // namespace

TEST(Verify, ZeroSolutionAudits) {
  const SolutionRecord rec = zero_run();
  EXPECT_EQ(audit_d1(rec, {0.1, 0.9}, 10), 0.0);
  const ResidualReport r = residual_interior(rec, 10);
  EXPECT_EQ(r.at("interior_residual").value, 0.0);
  EXPECT_THROW(check_dc(rec, 0.6, 10), std::out_of_range);
  const std::vector<double> eps{0.2, 0.1};
  const ResidualReport f = check_front_conditions(rec, 10, eps);
  for (const auto& e : f.entries) EXPECT_EQ(e.value, 0.0) << e.name;
  const ResidualReport m = monitor_assumptions(rec);
  EXPECT_TRUE(m.passed());
  EXPECT_EQ(m.at("A2_min_front_increment").value, 0.0);
}

TEST(Verify, WindowAuditIsExactOnSolverOutput) {
  for (const Grading grading : {Grading::uniform(), Grading::graded_for(0.5)}) {
    ModelParams p = melt(0.5, 120, 150);
    p.grading = grading;
    const SolutionRecord rec = run(p);
    for (const AuditWindow w : audit_windows(0.0, 1.0, rec.space.dx())) {
      for (std::size_t n : {std::size_t{1}, rec.last() / 3, rec.last()}) {
        EXPECT_LE(audit_d1(rec, w, n), 1e-8) << w.a << "," << w.b << " n=" << n;
      }
    }
  }
}

TEST(Verify, WindowAuditRejectsBadWindows) {
  const SolutionRecord rec = zero_run();
  EXPECT_THROW(audit_d1(rec, {0.5, 0.4}, 1), std::invalid_argument);
  EXPECT_THROW(audit_d1(rec, {0.0, 1.5}, 1), std::invalid_argument);
  EXPECT_THROW(audit_d1(rec, {0.501, 0.502}, 1), std::invalid_argument);
  EXPECT_THROW(audit_d1(rec, {0.0, 0.5}, 11), std::out_of_range);
}

TEST(Verify, WindowAuditOnManufacturedTrajectoryConvergesFirstOrder) {
  const ManufacturedCase mc = manufactured_case("quadratic-front", 0.5);
  double prev = 0.0;
  for (std::size_t nx : {60, 120, 240}) {
    const SolutionRecord rec = sample_case(mc, mc.params(nx, 2 * nx));
    const double d = audit_d1(rec, {0.2, 0.9}, rec.last());
    if (prev > 0.0) {
      EXPECT_GT(prev / d, 1.9) << "nx=" << nx;
    }
    prev = d;
  }
}

TEST(Verify, InteriorResidualVanishesUnderRefinement) {
  const ManufacturedCase mc = manufactured_case("frozen-front", 0.5);
  double prev = 0.0;
  for (std::size_t nx : {20, 40, 80}) {
    const SolutionRecord rec = run(mc.params(nx, 2 * nx), mc.data);
    const double r = residual_interior(rec, rec.last()).at("interior_residual").value;
    if (prev > 0.0) {
      EXPECT_GT(prev / r, 1.8) << "nx=" << nx;
    }
    prev = r;
  }
}

TEST(Verify, InteriorResidualNeedsAStep) {
  const SolutionRecord rec = zero_run();
  EXPECT_THROW(residual_interior(rec, 0), std::invalid_argument);
}

TEST(Verify, FrontIdentityMismatchShrinks) {
  const ManufacturedCase mc = manufactured_case("quadratic-front", 0.5);
  double prev = 0.0;
  for (std::size_t nx : {30, 60, 120}) {
    const SolutionRecord rec = sample_case(mc, mc.params(nx, 2 * nx));
    const double d = check_dc(rec, 0.75, rec.last());
    if (prev > 0.0) {
      EXPECT_GT(prev / d, 1.5) << "nx=" << nx;
    }
    prev = d;
  }
}

TEST(Verify, FrontIdentityDomain) {
  const ManufacturedCase mc = manufactured_case("quadratic-front", 0.5);
  const SolutionRecord rec = sample_case(mc, mc.params(30, 20));
  EXPECT_THROW(check_dc(rec, 0.5, rec.last()), std::out_of_range);
  EXPECT_THROW(check_dc(rec, 1.01, rec.last()), std::out_of_range);
}

TEST(Verify, SourceIntegralOnLinearPath) {
  // s = c t from 0: int_{s-eps}^{s} (t - x/c)^{-beta} dx = c (eps/c)^{1-beta} / (1-beta).
  const double c = 0.8, beta = 0.3, t = 1.0;
  InterfacePath path(0.0, 0.0);
  for (std::size_t k = 1; k <= 50; ++k) path.push_back(0.02 * static_cast<double>(k), c * 0.02 * static_cast<double>(k));
  const std::vector<double> eps{0.4, 0.2, 0.1, 0.05};
  const auto v = limit_e2(path, beta, t, eps);
  for (std::size_t k = 0; k < eps.size(); ++k) {
    EXPECT_NEAR(v[k], c * std::pow(eps[k] / c, 1.0 - beta) / (1.0 - beta), 1e-12);
    if (k > 0) {
      EXPECT_NEAR(v[k - 1] / v[k], std::pow(2.0, 1.0 - beta), 1e-12);
    }
  }
}

TEST(Verify, LimitOnSquareRootPathMatchesClosedForm) {
  // s = sqrt(t): the layer integral is pi/2 - asin(1 - eps/sqrt(t)).
  InterfacePath path(0.0, 0.0);
  const std::size_t n = 20000;
  for (std::size_t k = 1; k <= n; ++k) {
    const double t = static_cast<double>(k) / static_cast<double>(n);
    path.push_back(t, std::sqrt(t));
  }
  const double t = 1.0;
  std::vector<double> eps;
  for (double e = 0.2; e > 1e-7; e *= 0.5) eps.push_back(e);
  const auto v = limit_e2(path, 0.5, t, eps);
  for (std::size_t k = 0; k < eps.size(); ++k) {
    const double exact = std::numbers::pi / 2.0 - std::asin(1.0 - eps[k] / std::sqrt(t));
    EXPECT_NEAR(v[k] / exact, 1.0, 0.01) << "eps=" << eps[k];
    if (k > 0) {
      EXPECT_LT(v[k], v[k - 1]);
    }
  }
  EXPECT_LT(v.back(), 1e-3);
}

TEST(Verify, LimitConventionsAndErrors) {
  InterfacePath path(0.0, 0.0);
  path.push_back(1.0, 1.0);
  const std::vector<double> zero{0.0};
  EXPECT_EQ(limit_e2(path, 0.5, 1.0, zero)[0], 0.0);
  const std::vector<double> neg{-0.1};
  EXPECT_THROW(limit_e2(path, 0.5, 1.0, neg), std::invalid_argument);
  EXPECT_THROW(limit_e2(path, 1.0, 1.0, zero), std::domain_error);
}

TEST(Verify, FrontConditionsOnFractionalRun) {
  const SolutionRecord rec = run(melt(0.5, 200, 200));
  const double dx = rec.space.dx();
  const std::vector<double> eps{8 * dx, 4 * dx, 2 * dx, dx};
  const ResidualReport r = check_front_conditions(rec, rec.last(), eps);
  EXPECT_LE(r.at("front_temperature").value, 1e-6);
  EXPECT_EQ(r.at("front_gradient_trend").verdict, Verdict::pass);
  EXPECT_LE(r.at("front_gradient_trend").value, 0.5);
  const std::vector<double> too_wide{2.0};
  EXPECT_THROW(check_front_conditions(rec, rec.last(), too_wide), std::invalid_argument);
}

TEST(Verify, FrontGradientOnlyReportedNearBetaOne) {
  ModelParams p;
  p.beta = 0.999;
  p.length = 2.0;
  p.nx = 100;
  p.nt = 200;
  p.bc_value = 1.0;
  const SolutionRecord rec = run(p);
  const double dx = rec.space.dx();
  const std::vector<double> eps{8 * dx, 4 * dx, 2 * dx, dx};
  const ResidualReport r = check_front_conditions(rec, rec.last(), eps);
  EXPECT_EQ(r.at("front_gradient_trend").verdict, Verdict::info);
  // Classical front: the gradient tends to -s' instead of 0.
  const double speed = neumann_reference(1.0).front_speed(1.0);
  EXPECT_NEAR(r.at("front_gradient_eps_4").value, speed, 0.15 * speed);
  // The A4 exponent is 2/(1-beta) = 2000 here; the statistic must stay finite.
  EXPECT_TRUE(monitor_assumptions(rec).passed());
}

TEST(Verify, MonitorsOnMeltingRun) {
  const ResidualReport coarse = monitor_assumptions(run(melt(0.5, 100, 100)));
  const ResidualReport fine = monitor_assumptions(run(melt(0.5, 200, 200)));
  EXPECT_TRUE(coarse.passed());
  EXPECT_TRUE(fine.passed());
  EXPECT_GE(fine.at("A2_min_front_increment").value, 0.0);
  const double a = coarse.at("A3_front_speed_bound").value, b = fine.at("A3_front_speed_bound").value;
  EXPECT_LT(std::abs(a - b) / b, 0.2);
}

TEST(Verify, ReportHelpers) {
  ResidualReport r;
  r.add("x", "max", 1.0, Verdict::pass);
  r.add("y", "abs", 2.0);
  EXPECT_TRUE(r.passed());
  EXPECT_EQ(r.at("y").value, 2.0);
  EXPECT_THROW((void)r.at("z"), std::out_of_range);
  r.add("z", "abs", 3.0, Verdict::fail);
  EXPECT_FALSE(r.passed());
}

TEST(Pipeline, ZeroDataAuditsAllPass) {
  RunConfig cfg;
  cfg.model.x0 = 0.3;
  cfg.model.nx = 30;
  cfg.model.nt = 30;
  cfg.model.bc_value = 0.0;
  const SolutionRecord rec = produce_record(cfg);
  const ResidualReport r = run_audits(rec, cfg.audits);
  EXPECT_TRUE(r.passed());
  EXPECT_FALSE(conservation_breach(r));
}

TEST(Pipeline, WindowsAreInsideTheRangeAndWide) {
  for (const AuditWindow w : audit_windows(0.0, 0.5, 0.01)) {
    EXPECT_GE(w.a, 0.0);
    EXPECT_LE(w.b, 0.5);
    EXPECT_GE(w.b - w.a, 0.02 - 1e-15);
  }
  EXPECT_EQ(audit_windows(0.0, 1.0, 0.01).size(), kWindowCount);
}

TEST(Pipeline, BreachDetection) {
  ResidualReport r;
  r.add("front_gradient_trend", "ratio", 0.9, Verdict::fail);
  EXPECT_FALSE(conservation_breach(r));
  r.add("d1_window_3", "abs", 1.0, Verdict::fail);
  EXPECT_TRUE(conservation_breach(r));
}
