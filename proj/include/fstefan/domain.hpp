#pragma once

// Model data for the one-phase melting problem: parameters, the cell grid,
// the enthalpy/temperature closure and the interface path with its inverse.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fstefan/time_grid.hpp"

namespace fstefan {

enum class BoundaryKind { dirichlet, neumann };
enum class InitialKind { zero, constant, linear };

/// Invalid parameter; key() names the offending config key.
class ParamError : public std::invalid_argument {
 public:
  ParamError(std::string key, const std::string& what)
      : std::invalid_argument(what), key_(std::move(key)) {}
  [[nodiscard]] const std::string& key() const { return key_; }

 private:
  std::string key_;
};

struct ModelParams {
  double beta = 0.5;
  double length = 1.0;
  double x0 = 0.0;
  double t_end = 1.0;
  std::size_t nx = 100;
  std::size_t nt = 100;
  Grading grading;
  BoundaryKind bc_kind = BoundaryKind::dirichlet;
  double bc_value = 0.0;  // T_D >= 0 or T_N <= 0
  InitialKind t0_kind = InitialKind::zero;
  double t0_value = 0.0;  // level of T0 at x = 0; T0 vanishes right of x0

  void validate() const {
    if (!(beta > 0.0 && beta < 1.0)) throw ParamError("beta", "beta must lie in (0,1)");
    if (!(length > 0.0) || !std::isfinite(length)) throw ParamError("length", "length must be positive");
    if (!(x0 >= 0.0 && x0 < length)) throw ParamError("x0", "x0 must lie in [0,length)");
    if (!(t_end > 0.0) || !std::isfinite(t_end)) throw ParamError("t_end", "t_end must be positive");
    if (nx < 2) throw ParamError("nx", "nx must be at least 2");
    if (nt < 1) throw ParamError("nt", "nt must be at least 1");
    if (grading.kind == Grading::Kind::graded && !(grading.exponent >= 1.0)) {
      throw ParamError("grading", "grading exponent must be >= 1");
    }
    if (!std::isfinite(bc_value)) throw ParamError("bc_value", "bc_value must be finite");
    if (bc_kind == BoundaryKind::dirichlet && bc_value < 0.0) {
      throw ParamError("bc_value", "Dirichlet data must be >= 0");
    }
    if (bc_kind == BoundaryKind::neumann && bc_value > 0.0) {
      throw ParamError("bc_value", "Neumann data must be <= 0");
    }
    if (t0_kind != InitialKind::zero && !(t0_value >= 0.0 && std::isfinite(t0_value))) {
      throw ParamError("t0_value", "initial temperature must be >= 0");
    }
  }

  [[nodiscard]] TimeGrid time_grid() const { return TimeGrid(t_end, nt, grading); }

  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

/// Time-dependent data and optional manufactured forcing. The defaults
/// derived from ModelParams are constant in time.
struct ProblemData {
  std::function<double(double)> boundary;  // T_D(t) or T_N(t)
  std::function<double(double)> initial;   // T0(x) on (0, x0)
  // int_{xl}^{xr} int_0^t F dx dt for the conservative form; empty if unforced.
  std::function<double(double, double, double)> cumulative_source;
  // Forcing F of the strong (Caputo) form, pointwise and integrated over
  // [xl, xr]; used by the audits. Empty if unforced.
  std::function<double(double, double)> strong_forcing;
  std::function<double(double, double, double)> strong_forcing_integral;
  // Front held at x0 with T = 0 there; the latent heat acts as infinite.
  bool pin_front = false;
};

inline ProblemData standard_data(const ModelParams& p) {
  ProblemData d;
  const double bc = p.bc_value;
  d.boundary = [bc](double) { return bc; };
  const double level = p.t0_value;
  const double x0 = p.x0;
  switch (p.t0_kind) {
    case InitialKind::zero: d.initial = [](double) { return 0.0; }; break;
    case InitialKind::constant: d.initial = [level](double) { return level; }; break;
    case InitialKind::linear:
      d.initial = [level, x0](double x) { return x0 > 0.0 ? std::max(level * (1.0 - x / x0), 0.0) : 0.0; };
      break;
  }
  return d;
}

/// Uniform cell-centred grid on [0, L]: cell i spans [i dx, (i+1) dx].
struct SpaceGrid {
  double length = 1.0;
  std::size_t cells = 1;

  [[nodiscard]] double dx() const { return length / static_cast<double>(cells); }
  [[nodiscard]] double center(std::size_t i) const { return (static_cast<double>(i) + 0.5) * dx(); }
  [[nodiscard]] double face(std::size_t f) const { return static_cast<double>(f) * dx(); }
  [[nodiscard]] std::size_t faces() const { return cells + 1; }
};

/// Front cell index plus its melted fraction in [0,1). cell == cells means the
/// whole domain is liquid.
struct FrontLocation {
  std::size_t cell = 0;
  double fraction = 0.0;

  [[nodiscard]] double position(const SpaceGrid& g) const {
    return (static_cast<double>(cell) + fraction) * g.dx();
  }
  friend bool operator==(const FrontLocation&, const FrontLocation&) = default;
};

inline FrontLocation front_from_position(const SpaceGrid& g, double s) {
  if (s < 0.0 || s > g.length) throw std::invalid_argument("front position outside the domain");
  const double u = s / g.dx();
  auto cell = static_cast<std::size_t>(std::floor(u));
  if (cell >= g.cells) return {g.cells, 0.0};
  return {cell, u - static_cast<double>(cell)};
}

class ClosureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// E = T + 1 in liquid cells, the melted fraction in the front cell, 0 in solid.
inline std::vector<double> enthalpy_from_temperature(std::span<const double> temperature,
                                                     FrontLocation front) {
  std::vector<double> e(temperature.size(), 0.0);
  if (front.cell > temperature.size() || !(front.fraction >= 0.0 && front.fraction < 1.0)) {
    throw ClosureError("front location outside the grid");
  }
  for (std::size_t i = 0; i < temperature.size(); ++i) {
    const double t = temperature[i];
    if (t < 0.0) throw ClosureError("negative temperature in cell " + std::to_string(i));
    if (i < front.cell) {
      e[i] = t + 1.0;
    } else {
      if (t != 0.0) throw ClosureError("nonzero temperature in solid or front cell " + std::to_string(i));
      e[i] = i == front.cell ? front.fraction : 0.0;
    }
  }
  return e;
}

struct ClosureResult {
  std::vector<double> temperature;
  FrontLocation front;
};

/// Inverse closure T = max(E - 1, 0). The front cell is the first cell with
/// E < 1; every cell to its right must hold E = 0.
inline ClosureResult temperature_from_enthalpy(std::span<const double> enthalpy) {
  ClosureResult out;
  out.temperature.assign(enthalpy.size(), 0.0);
  std::size_t j = 0;
  while (j < enthalpy.size() && enthalpy[j] >= 1.0) {
    out.temperature[j] = enthalpy[j] - 1.0;
    ++j;
  }
  out.front = {j, 0.0};
  if (j == enthalpy.size()) return out;
  if (enthalpy[j] < 0.0) throw ClosureError("negative enthalpy in cell " + std::to_string(j));
  out.front.fraction = enthalpy[j];
  for (std::size_t i = j + 1; i < enthalpy.size(); ++i) {
    if (enthalpy[i] != 0.0) {
      throw ClosureError("enthalpy " + std::to_string(enthalpy[i]) + " in cell " + std::to_string(i) +
                         " right of the front cell " + std::to_string(j) + " (single front violated)");
    }
  }
  return out;
}

/// Monotone samples of the front position s(t_n).
class InterfacePath {
 public:
  InterfacePath() = default;
  InterfacePath(double t0, double s0) : times_{t0}, positions_{s0} {}
  InterfacePath(std::vector<double> times, std::vector<double> positions)
      : times_(std::move(times)), positions_(std::move(positions)) {
    if (times_.empty() || times_.size() != positions_.size()) {
      throw std::invalid_argument("InterfacePath: times and positions must match and be nonempty");
    }
    for (std::size_t k = 1; k < times_.size(); ++k) {
      if (!(times_[k] > times_[k - 1])) throw std::invalid_argument("InterfacePath: times must increase");
      if (positions_[k] < positions_[k - 1]) {
        throw std::invalid_argument("InterfacePath: positions must be nondecreasing");
      }
    }
  }

  void push_back(double t, double s) {
    if (!times_.empty() && !(t > times_.back())) throw std::invalid_argument("InterfacePath: time must increase");
    if (!positions_.empty() && s < positions_.back()) {
      throw std::invalid_argument("InterfacePath: front regression (positions must be nondecreasing)");
    }
    times_.push_back(t);
    positions_.push_back(s);
  }

  [[nodiscard]] std::size_t size() const { return times_.size(); }
  [[nodiscard]] double time(std::size_t n) const { return times_[n]; }
  [[nodiscard]] double position(std::size_t n) const { return positions_[n]; }
  [[nodiscard]] double initial() const { return positions_.front(); }
  [[nodiscard]] double current() const { return positions_.back(); }
  [[nodiscard]] const std::vector<double>& times() const { return times_; }
  [[nodiscard]] const std::vector<double>& positions() const { return positions_; }

  /// s(t) by linear interpolation, t within the recorded span.
  [[nodiscard]] double at(double t) const {
    if (t <= times_.front()) return positions_.front();
    if (t >= times_.back()) return positions_.back();
    const auto it = std::upper_bound(times_.begin(), times_.end(), t);
    const auto k = static_cast<std::size_t>(it - times_.begin());
    const double w = (t - times_[k - 1]) / (times_[k] - times_[k - 1]);
    return positions_[k - 1] + w * (positions_[k] - positions_[k - 1]);
  }

  // Linear inverse on one segment with s_lo < x <= s_hi.
  static double inverse_on_segment(double t_lo, double t_hi, double s_lo, double s_hi, double x) {
    return t_lo + (x - s_lo) / (s_hi - s_lo) * (t_hi - t_lo);
  }

 private:
  std::vector<double> times_;
  std::vector<double> positions_;
};

/// First time the piecewise-linear path reaches x, for s(0) < x <= s(t_last).
/// The segment is located by bisection over the monotone samples.
inline double interface_inverse(const InterfacePath& path, double x) {
  const auto& s = path.positions();
  if (!(x > s.front() && x <= s.back())) {
    throw std::out_of_range("interface_inverse: x must lie in (s(0), s(t_current)]");
  }
  const auto it = std::lower_bound(s.begin(), s.end(), x);
  const auto j = static_cast<std::size_t>(it - s.begin());
  return InterfacePath::inverse_on_segment(path.time(j - 1), path.time(j), s[j - 1], s[j], x);
}

}  // namespace fstefan
