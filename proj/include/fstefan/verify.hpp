#pragma once

// Audits of a solution record against the balance identities, the limit
// relations at the front and the regularity assumptions of the model.
//
// All functions are read-only on the record. Delayed operators use the time
// the front first reached the point, taken from the piecewise-linear path;
// the singular source (t - s^{-1}(x))^{-beta} is integrated in closed form
// on each path segment and never sampled at its singularity.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fstefan/domain.hpp"
#include "fstefan/fracops.hpp"
#include "fstefan/gamma.hpp"
#include "fstefan/neumann.hpp"
#include "fstefan/solver.hpp"

namespace fstefan {

struct AuditWindow {
  double a = 0.0;
  double b = 0.0;
};

enum class Verdict { pass, fail, info };

inline std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::info: return "info";
  }
  return "info";
}

struct ResidualEntry {
  std::string name;
  std::string norm;  // max | l1 | abs | ratio | min
  double value = 0.0;
  Verdict verdict = Verdict::info;
};

struct ResidualReport {
  std::vector<ResidualEntry> entries;
  std::size_t nx = 0;
  std::size_t nt = 0;
  double time = 0.0;

  void add(std::string name, std::string norm, double value, Verdict v = Verdict::info) {
    entries.push_back({std::move(name), std::move(norm), value, v});
  }
  [[nodiscard]] bool passed() const {
    return std::none_of(entries.begin(), entries.end(),
                        [](const ResidualEntry& e) { return e.verdict == Verdict::fail; });
  }
  [[nodiscard]] const ResidualEntry& at(std::string_view name) const {
    for (const auto& e : entries) {
      if (e.name == name) return e;
    }
    throw std::out_of_range("no report entry named " + std::string(name));
  }
  void append(const ResidualReport& other) {
    entries.insert(entries.end(), other.entries.begin(), other.entries.end());
  }
};

namespace detail {

inline ResidualReport make_report(const SolutionRecord& rec, std::size_t n) {
  ResidualReport r;
  r.nx = rec.space.cells;
  r.nt = rec.grid.steps();
  r.time = rec.grid[n];
  return r;
}

inline void check_index(const SolutionRecord& rec, std::size_t n) {
  if (n > rec.last()) throw std::out_of_range("audit time index beyond the record");
}

inline std::vector<double> face_trace(const SolutionRecord& rec, std::size_t f, std::size_t n) {
  std::vector<double> v(n + 1);
  for (std::size_t k = 0; k <= n; ++k) v[k] = rec.gradient[k][f];
  return v;
}

inline std::vector<double> cell_trace(const SolutionRecord& rec, std::size_t i, std::size_t n) {
  std::vector<double> v(n + 1);
  for (std::size_t k = 0; k <= n; ++k) v[k] = rec.temperature[k][i];
  return v;
}

// Lower limit of the delayed operators at x: 0 left of s(0), else the first
// crossing time. Requires x <= s(t_n).
inline double origin_time(const SolutionRecord& rec, double x) {
  return x <= rec.path.initial() ? 0.0 : interface_inverse(rec.path, x);
}

// Face gradients interpolated linearly to position x.
inline double gradient_at(const SolutionRecord& rec, std::size_t n, double x) {
  const SpaceGrid& g = rec.space;
  const double u = std::clamp(x / g.dx(), 0.0, static_cast<double>(g.cells));
  const auto f = std::min(static_cast<std::size_t>(std::floor(u)), g.cells - 1);
  const double w = u - static_cast<double>(f);
  return (1.0 - w) * rec.gradient[n][f] + w * rec.gradient[n][f + 1];
}

// Delayed Caputo derivative of the cell-centre temperature trace.
inline double cell_caputo(const SolutionRecord& rec, std::size_t i, std::size_t n) {
  const std::vector<double> trace = cell_trace(rec, i, n);
  const SampledHistory h{&rec.grid, trace, 0};
  const double x = rec.space.center(i);
  if (x <= rec.path.initial()) return caputo_l1(h, rec.params.beta, n);
  return delayed_caputo(h, rec.params.beta, Origin{interface_inverse(rec.path, x), 0.0}, n);
}

inline std::size_t liquid_cells(const SolutionRecord& rec, std::size_t n) {
  if (rec.data.pin_front) return pinned_cell(rec.params, rec.space);
  return std::min(rec.fronts[n].cell, rec.space.cells);
}

}  // namespace detail

/// int_{x1}^{x2} (t - s^{-1}(x))^{-beta} dx over the part of [x1, x2] the
/// front has swept by time t, exact on every linear path segment.
inline double front_source_integral(const InterfacePath& path, double beta, double t, double x1,
                                    double x2) {
  if (x2 <= x1) return 0.0;
  if (x1 < path.initial()) {
    throw std::invalid_argument("front_source_integral: interval starts left of s(0)");
  }
  double total = 0.0;
  const double e = 1.0 - beta;
  for (std::size_t k = 0; k + 1 < path.size() && path.time(k) < t; ++k) {
    const double t_lo = path.time(k);
    const double t_hi = std::min(path.time(k + 1), t);
    const double s_lo = path.position(k);
    const double s_hi = t_hi == path.time(k + 1) ? path.position(k + 1) : path.at(t_hi);
    if (!(s_hi > s_lo)) continue;
    const double lo = std::max(x1, s_lo);
    const double hi = std::min(x2, s_hi);
    if (!(hi > lo)) continue;
    const double speed = (s_hi - s_lo) / (t_hi - t_lo);
    const double tau_lo = t_lo + (lo - s_lo) / speed;
    const double tau_hi = t_lo + (hi - s_lo) / speed;
    total += speed * (std::pow(t - tau_lo, e) - std::pow(std::max(t - tau_hi, 0.0), e)) / e;
  }
  return total;
}

/// Mismatch of the integrated balance over a window at t_n: enthalpy gain
/// versus the fractional integral of the endpoint gradient difference (plus
/// any manufactured source). Window endpoints snap to the nearest face.
inline double audit_d1(const SolutionRecord& rec, AuditWindow w, std::size_t n) {
  detail::check_index(rec, n);
  const SpaceGrid& g = rec.space;
  if (!(w.a >= 0.0 && w.b <= g.length && w.a < w.b)) {
    throw std::invalid_argument("audit_d1: window must satisfy 0 <= a < b <= L");
  }
  const auto fa = static_cast<std::size_t>(std::lround(w.a / g.dx()));
  const auto fb = static_cast<std::size_t>(std::lround(w.b / g.dx()));
  if (fa >= fb) throw std::invalid_argument("audit_d1: window narrower than one cell after snapping");
  // A pinned front is an enthalpy sink; windows must stay left of it.
  if (rec.data.pin_front && fb > detail::pinned_cell(rec.params, g)) {
    throw std::invalid_argument("audit_d1: window crosses the pinned front");
  }

  double gain = 0.0;
  double forced = 0.0;
  for (std::size_t i = fa; i < fb; ++i) {
    gain += (rec.enthalpy[n][i] - rec.enthalpy[0][i]) * g.dx();
    forced += rec.source[n][i];
  }
  auto memory = [&](std::size_t f) {
    const double x = g.face(f);
    if (x > rec.path.position(n)) return 0.0;
    const std::vector<double> trace = detail::face_trace(rec, f, n);
    const SampledHistory h{&rec.grid, trace, 0};
    return delayed_integral(h, rec.params.beta, Origin{detail::origin_time(rec, x), 0.0}, n,
                            Reconstruction::right_constant);
  };
  return std::abs(gain - forced - (memory(fb) - memory(fa)));
}

/// Pointwise residual of  C D^beta T - T_xx + source - F  over interior cells,
/// excluding the wall cell, the front cell and its liquid neighbour.
inline ResidualReport residual_interior(const SolutionRecord& rec, std::size_t n) {
  detail::check_index(rec, n);
  if (n == 0) throw std::invalid_argument("residual_interior: need n >= 1");
  const SpaceGrid& g = rec.space;
  const double beta = rec.params.beta;
  const double t = rec.grid[n];
  const double gs = gamma_fn(1.0 - beta);
  const std::size_t liquid = detail::liquid_cells(rec, n);
  double max_r = 0.0, l1 = 0.0;
  const auto& temp = rec.temperature[n];
  for (std::size_t i = 1; i + 1 < liquid; ++i) {
    const double x = g.center(i);
    double r = detail::cell_caputo(rec, i, n) -
               (temp[i + 1] - 2.0 * temp[i] + temp[i - 1]) / (g.dx() * g.dx());
    if (x > rec.path.initial()) r += std::pow(t - interface_inverse(rec.path, x), -beta) / gs;
    if (rec.data.strong_forcing) r -= rec.data.strong_forcing(x, t);
    max_r = std::max(max_r, std::abs(r));
    l1 += std::abs(r) * g.dx();
  }
  ResidualReport rep = detail::make_report(rec, n);
  rep.add("interior_residual", "max", max_r);
  rep.add("interior_residual", "l1", l1);
  return rep;
}

/// int_a^{s(t_n)} of the delayed Caputo derivative, from the piecewise-linear
/// interpolant of cell-centre values closed by zero at the front.
inline double caputo_front_integral(const SolutionRecord& rec, std::size_t n, double a) {
  const SpaceGrid& g = rec.space;
  const double s = rec.path.position(n);
  if (a >= s) return 0.0;
  const std::size_t liquid = detail::liquid_cells(rec, n);
  std::vector<double> xs, ds;
  for (std::size_t i = 0; i < liquid && g.center(i) < s; ++i) {
    if (g.center(i) + g.dx() < a) continue;
    xs.push_back(g.center(i));
    ds.push_back(detail::cell_caputo(rec, i, n));
  }
  xs.push_back(s);
  ds.push_back(0.0);
  auto value = [&](double x) {
    if (x <= xs.front()) return ds.front();
    const auto it = std::upper_bound(xs.begin(), xs.end(), x);
    const auto k = static_cast<std::size_t>(it - xs.begin());
    if (k >= xs.size()) return ds.back();
    const double w = (x - xs[k - 1]) / (xs[k] - xs[k - 1]);
    return (1.0 - w) * ds[k - 1] + w * ds[k];
  };
  double total = 0.0;
  double left = a;
  double v_left = value(a);
  for (std::size_t k = 0; k < xs.size(); ++k) {
    if (xs[k] <= a) continue;
    total += 0.5 * (v_left + ds[k]) * (xs[k] - left);
    left = xs[k];
    v_left = ds[k];
  }
  return total;
}

/// Mismatch of the integrated front identity at position a, s(0) < a < s(t_n):
///   int_a^s C D T dx + 1/G(1-beta) int_a^s (t - s^{-1})^{-beta} dx + T_x(a) - int_a^s F dx.
inline double check_dc(const SolutionRecord& rec, double a, std::size_t n) {
  detail::check_index(rec, n);
  const double s = rec.path.position(n);
  if (!(a > rec.path.initial() && a < s)) {
    throw std::out_of_range("check_dc: a must lie in (s(0), s(t_n))");
  }
  const double beta = rec.params.beta;
  const double t = rec.grid[n];
  double mismatch = caputo_front_integral(rec, n, a) +
                    front_source_integral(rec.path, beta, t, a, s) / gamma_fn(1.0 - beta) +
                    detail::gradient_at(rec, n, a);
  if (rec.data.strong_forcing_integral) mismatch -= rec.data.strong_forcing_integral(a, s, t);
  return std::abs(mismatch);
}

/// Temperature at the front and |T_x(s - eps)| for each eps (largest first).
/// The trend passes if |T_x| decreases with eps and the last value is at most
/// half of the first; above beta = 0.7 the trend is reported only.
inline ResidualReport check_front_conditions(const SolutionRecord& rec, std::size_t n,
                                             std::span<const double> epsilons) {
  detail::check_index(rec, n);
  ResidualReport rep = detail::make_report(rec, n);
  const double s = rec.path.position(n);
  if (!(s < rec.space.length)) throw std::invalid_argument("front must lie strictly inside the domain");
  const FrontLocation fr = rec.fronts[n];
  const double front_t =
      fr.cell < rec.space.cells ? std::max(rec.enthalpy[n][fr.cell] - 1.0, 0.0) : 0.0;
  rep.add("front_temperature", "abs", std::abs(front_t),
          std::abs(front_t) <= 1e-6 ? Verdict::pass : Verdict::fail);

  std::vector<double> grads;
  for (const double eps : epsilons) {
    if (!(eps > 0.0) || eps >= s) {
      throw std::invalid_argument("check_front_conditions: eps must lie in (0, s(t))");
    }
    grads.push_back(std::abs(detail::gradient_at(rec, n, s - eps)));
    rep.add("front_gradient_eps_" + std::to_string(grads.size()), "abs", grads.back());
  }
  if (!grads.empty()) {
    bool monotone = true;
    for (std::size_t k = 1; k < grads.size(); ++k) monotone = monotone && grads[k] <= grads[k - 1];
    const double ratio = grads.front() > 0.0 ? grads.back() / grads.front() : 0.0;
    const bool ok = monotone && ratio <= 0.5;
    rep.add("front_gradient_trend", "ratio", ratio,
            rec.params.beta > 0.7 ? Verdict::info : (ok ? Verdict::pass : Verdict::fail));
  }
  return rep;
}

/// int_{s(t)-eps}^{s(t)} (t - s^{-1}(x))^{-beta} dx for every eps; eps = 0 gives 0.
inline std::vector<double> limit_e2(const InterfacePath& path, double beta, double t,
                                    std::span<const double> epsilons) {
  if (!(beta > 0.0 && beta < 1.0)) throw std::domain_error("limit_e2: beta must lie in (0,1)");
  const double s = path.at(t);
  std::vector<double> out;
  out.reserve(epsilons.size());
  for (const double eps : epsilons) {
    if (eps < 0.0) throw std::invalid_argument("limit_e2: eps must be nonnegative");
    out.push_back(eps == 0.0 ? 0.0 : front_source_integral(path, beta, t, s - eps, s));
  }
  return out;
}

/// Discrete surrogates of the regularity assumptions, at the last record index.
///   A1  total variation of T_x on [0, s - 2 dx]
///   A2  smallest front increment per step
///   A3  max_n t_n^{1-beta} (s_n - s_{n-1}) / dt_n
///   A4  L^a norm of T_t over the near-front wedge, a = 2 / (1 - beta), width 8 dx
///   e4  |int_{s-eps0}^{s} C D T dx| for the same width
inline ResidualReport monitor_assumptions(const SolutionRecord& rec) {
  const std::size_t n = rec.last();
  ResidualReport rep = detail::make_report(rec, n);
  const SpaceGrid& g = rec.space;
  const double beta = rec.params.beta;
  const double s = rec.path.position(n);
  auto finite = [](double v) { return std::isfinite(v) ? Verdict::pass : Verdict::fail; };

  double tv = 0.0;
  for (std::size_t f = 0; f + 1 < g.faces() && g.face(f + 1) <= s - 2.0 * g.dx(); ++f) {
    tv += std::abs(rec.gradient[n][f + 1] - rec.gradient[n][f]);
  }
  rep.add("A1_gradient_variation", "l1", tv, finite(tv));

  double min_inc = std::numeric_limits<double>::infinity();
  double a3 = 0.0;
  for (std::size_t k = 1; k <= n; ++k) {
    const double ds = rec.path.position(k) - rec.path.position(k - 1);
    min_inc = std::min(min_inc, ds);
    a3 = std::max(a3, std::pow(rec.grid[k], 1.0 - beta) * ds / rec.grid.dt(k));
  }
  if (n == 0) min_inc = 0.0;
  rep.add("A2_min_front_increment", "min", min_inc, min_inc >= 0.0 ? Verdict::pass : Verdict::fail);
  rep.add("A3_front_speed_bound", "max", a3, finite(a3));

  const double width = 8.0 * g.dx();
  const double a = 2.0 / (1.0 - beta);
  // Collected first and scaled by the peak: a grows like 2/(1-beta) and the
  // raw powers overflow near beta = 1.
  std::vector<std::pair<double, double>> rates;  // |T_t|, weight
  double peak = 0.0;
  const std::size_t liquid = detail::liquid_cells(rec, n);
  for (std::size_t i = 0; i < liquid; ++i) {
    const double x = g.center(i);
    if (x <= s - width || x >= s) continue;
    const double origin = detail::origin_time(rec, x);
    for (std::size_t k = 1; k <= n; ++k) {
      if (rec.grid[k] <= origin) continue;
      const double dt = rec.grid.dt(k);
      const double tt = std::abs(rec.temperature[k][i] - rec.temperature[k - 1][i]) / dt;
      rates.emplace_back(tt, g.dx() * dt);
      peak = std::max(peak, tt);
    }
  }
  double sum = 0.0;
  if (peak > 0.0) {
    for (const auto& [tt, w] : rates) sum += std::pow(tt / peak, a) * w;
  }
  const double a4 = peak > 0.0 ? peak * std::pow(sum, 1.0 / a) : 0.0;
  rep.add("A4_time_derivative_power", "La", a4, finite(a4));

  const double e4 = n == 0 ? 0.0 : std::abs(caputo_front_integral(rec, n, std::max(s - width, 0.0)));
  rep.add("e4_front_caputo_integral", "abs", e4, finite(e4));
  return rep;
}

/// Largest relative deviation of s(t) from the classical similarity front on
/// [t_end / 4, t_end]; meaningful for beta near 1, Dirichlet data, x0 = 0.
inline double classical_limit_error(const SolutionRecord& rec) {
  const NeumannReference ref = neumann_reference(rec.params.bc_value);
  const double t_lo = 0.25 * rec.params.t_end;
  double err = 0.0;
  for (std::size_t k = 0; k <= rec.last(); ++k) {
    const double t = rec.grid[k];
    if (t < t_lo) continue;
    err = std::max(err, std::abs(rec.path.position(k) - ref.front(t)) / ref.front(t));
  }
  return err;
}

}  // namespace fstefan
