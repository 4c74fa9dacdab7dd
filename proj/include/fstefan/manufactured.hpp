#pragma once

// Manufactured trajectories with closed-form forcing.
//
// frozen-front:   front pinned at s0, T = cos(k x) (1 + t^2), k = pi / (2 s0),
//                 insulated wall (T_x(0,t) = 0). Pure fractional diffusion.
// quadratic-front: s(t) = s0 + v t, T = (s(t) - x)^2 left of the front, so
//                 T = T_x = 0 at the front; Dirichlet wall data (s0 + v t)^2.
//
// For each case the forcing is given twice:
//  * cumulative_source(xl, xr, t) = int_{xl}^{xr} [E(x,t) - E(x,0)] dx
//                                   - [J(xr,t) - J(xl,t)],
//    J = fractional integral (from the crossing time) of T_x, which is what
//    the conservative solver consumes;
//  * strong_forcing F of  C D^beta T - T_xx + (t - s^{-1}(x))^{-beta}/G(1-beta) = F
//    (source only right of s0), with its x-integral in closed form, which the
//    audits consume.

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>

#include "fstefan/domain.hpp"
#include "fstefan/gamma.hpp"
#include "fstefan/solver.hpp"

namespace fstefan {

struct ManufacturedCase {
  std::string id;
  double beta = 0.5;
  double s0 = 0.5;
  double length = 1.0;
  BoundaryKind bc_kind = BoundaryKind::dirichlet;
  std::function<double(double)> front;                 // s(t)
  std::function<double(double, double)> temperature;  // T(x,t)
  ProblemData data;

  /// Parameters matching this case on an nx-by-nt grid over [0, t_end].
  [[nodiscard]] ModelParams params(std::size_t nx, std::size_t nt, double t_end = 1.0) const {
    ModelParams p;
    p.beta = beta;
    p.length = length;
    p.x0 = s0;
    p.t_end = t_end;
    p.nx = nx;
    p.nt = nt;
    p.bc_kind = bc_kind;
    p.bc_value = data.boundary(0.0);
    p.t0_kind = InitialKind::constant;  // overridden by data.initial
    p.t0_value = temperature(0.0, 0.0);
    return p;
  }
};

class UnknownCaseError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

namespace detail {

inline ManufacturedCase frozen_front(double beta) {
  ManufacturedCase c;
  c.id = "frozen-front";
  c.beta = beta;
  c.s0 = 1.0;
  c.length = 2.0;
  c.bc_kind = BoundaryKind::neumann;
  const double s0 = c.s0;
  const double k = std::numbers::pi / (2.0 * s0);
  const double g1 = gamma_fn(1.0 + beta);
  const double g3 = gamma_fn(3.0 + beta);
  const double gc = gamma_fn(3.0 - beta);
  // I^beta (1 + t^2)
  auto mem = [=](double t) { return std::pow(t, beta) / g1 + 2.0 * std::pow(t, 2.0 + beta) / g3; };
  // C D^beta (1 + t^2) + k^2 (1 + t^2)
  auto amp = [=](double t) { return 2.0 * std::pow(t, 2.0 - beta) / gc + k * k * (1.0 + t * t); };
  auto clip = [s0](double x) { return std::clamp(x, 0.0, s0); };

  c.front = [s0](double) { return s0; };
  c.temperature = [=](double x, double t) { return x < s0 ? std::cos(k * x) * (1.0 + t * t) : 0.0; };
  c.data.boundary = [](double) { return 0.0; };
  c.data.initial = [=](double x) { return x < s0 ? std::cos(k * x) : 0.0; };
  c.data.pin_front = true;
  c.data.cumulative_source = [=](double xl, double xr, double t) {
    const double ds = std::sin(k * clip(xr)) - std::sin(k * clip(xl));
    return t * t * ds / k + k * ds * mem(t);
  };
  c.data.strong_forcing = [=](double x, double t) { return x < s0 ? std::cos(k * x) * amp(t) : 0.0; };
  c.data.strong_forcing_integral = [=](double xl, double xr, double t) {
    return (std::sin(k * clip(xr)) - std::sin(k * clip(xl))) / k * amp(t);
  };
  return c;
}

inline ManufacturedCase quadratic_front(double beta) {
  ManufacturedCase c;
  c.id = "quadratic-front";
  c.beta = beta;
  c.s0 = 0.5;
  c.length = 1.5;
  c.bc_kind = BoundaryKind::dirichlet;
  const double s0 = c.s0;
  const double v = 0.5;
  const double g1 = gamma_fn(1.0 + beta);
  const double g2 = gamma_fn(2.0 + beta);
  const double c1 = gamma_fn(2.0 - beta);
  const double c2 = gamma_fn(3.0 - beta);
  const double cs = gamma_fn(1.0 - beta);
  auto s = [=](double t) { return s0 + v * t; };
  auto crossing = [=](double x) { return (x - s0) / v; };

  // Fractional integral of T_x(x, .) from its lower limit.
  auto memory = [=](double x, double t) {
    if (x <= s0) return -2.0 * ((s0 - x) * std::pow(t, beta) / g1 + v * std::pow(t, 1.0 + beta) / g2);
    const double tau = crossing(x);
    if (t <= tau) return 0.0;
    return -2.0 * v * std::pow(t - tau, 1.0 + beta) / g2;
  };
  // int_{xl}^{xr} E(x, t) dx
  auto enthalpy = [=](double xl, double xr, double t) {
    const double st = s(t);
    const double u = std::min(xr, st);
    if (u <= xl) return 0.0;
    return (std::pow(st - xl, 3) - std::pow(st - u, 3)) / 3.0 + (u - xl);
  };
  // int (t - tau(x))^p dx over [xl, xr] within (s0, s(t)), dx = v dtau
  auto power_int = [=](double xl, double xr, double t, double p) {
    return v * (std::pow(t - crossing(xl), p + 1.0) - std::pow(t - crossing(xr), p + 1.0)) / (p + 1.0);
  };

  c.front = s;
  c.temperature = [=](double x, double t) {
    const double d = s(t) - x;
    return d > 0.0 ? d * d : 0.0;
  };
  c.data.boundary = [=](double t) { return s(t) * s(t); };
  c.data.initial = [=](double x) { return x < s0 ? (s0 - x) * (s0 - x) : 0.0; };
  c.data.cumulative_source = [=](double xl, double xr, double t) {
    return enthalpy(xl, xr, t) - enthalpy(xl, xr, 0.0) - (memory(xr, t) - memory(xl, t));
  };
  c.data.strong_forcing = [=](double x, double t) {
    if (x >= s(t)) return 0.0;
    if (x <= s0) {
      return 2.0 * v * (s0 - x) * std::pow(t, 1.0 - beta) / c1 + 2.0 * v * v * std::pow(t, 2.0 - beta) / c2 - 2.0;
    }
    const double lag = t - crossing(x);
    return 2.0 * v * v * std::pow(lag, 2.0 - beta) / c2 - 2.0 + std::pow(lag, -beta) / cs;
  };
  c.data.strong_forcing_integral = [=](double xl, double xr, double t) {
    double total = 0.0;
    // part left of s0
    const double l0 = std::max(xl, 0.0), r0 = std::min(xr, s0);
    if (r0 > l0) {
      const double m = ((s0 - l0) * (s0 - l0) - (s0 - r0) * (s0 - r0)) / 2.0;
      total += 2.0 * v * m * std::pow(t, 1.0 - beta) / c1 +
               (2.0 * v * v * std::pow(t, 2.0 - beta) / c2 - 2.0) * (r0 - l0);
    }
    const double l1 = std::max(xl, s0), r1 = std::min(xr, s(t));
    if (r1 > l1) {
      total += 2.0 * v * v / c2 * power_int(l1, r1, t, 2.0 - beta) - 2.0 * (r1 - l1) +
               power_int(l1, r1, t, -beta) / cs;
    }
    return total;
  };
  return c;
}

}  // namespace detail

inline ManufacturedCase manufactured_case(std::string_view id, double beta = 0.5) {
  if (!(beta > 0.0 && beta < 1.0)) throw std::domain_error("manufactured_case: beta must lie in (0,1)");
  if (id == "frozen-front") return detail::frozen_front(beta);
  if (id == "quadratic-front") return detail::quadratic_front(beta);
  throw UnknownCaseError("unknown manufactured case '" + std::string(id) + "'");
}

/// The exact trajectory of a case sampled on the grid of `params`, packed as
/// a record so the audits can run on it. The cell holding the front is
/// isothermal (T = 0) as in the enthalpy representation.
inline SolutionRecord sample_case(const ManufacturedCase& mc, const ModelParams& params) {
  params.validate();
  SolutionRecord rec;
  rec.params = params;
  rec.data = mc.data;
  rec.grid = params.time_grid();
  rec.space = {params.length, params.nx};
  const SpaceGrid& g = rec.space;
  for (std::size_t n = 0; n < rec.grid.size(); ++n) {
    const double t = rec.grid[n];
    const double s = mc.front(t);
    const FrontLocation front = front_from_position(g, s);
    std::vector<double> temp(g.cells, 0.0), src(g.cells, 0.0);
    for (std::size_t i = 0; i < g.cells; ++i) {
      if (i < front.cell) temp[i] = mc.temperature(g.center(i), t);
      if (n > 0 && mc.data.cumulative_source) src[i] = mc.data.cumulative_source(g.face(i), g.face(i + 1), t);
    }
    rec.enthalpy.push_back(enthalpy_from_temperature(temp, front));
    rec.gradient.push_back(face_gradients(params, mc.data, g, temp, t));
    rec.temperature.push_back(std::move(temp));
    rec.flux.emplace_back(g.faces(), 0.0);
    rec.source.push_back(std::move(src));
    rec.fronts.push_back(front);
    rec.balance_residual.push_back(0.0);
    rec.iterations.push_back(0);
    if (n == 0) rec.path = InterfacePath(t, s); else rec.path.push_back(t, s);
  }
  return rec;
}

}  // namespace fstefan
