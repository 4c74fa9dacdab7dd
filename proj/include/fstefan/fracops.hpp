#pragma once

// Discrete fractional operators on sampled time histories.
//
// Histories are reconstructed piecewise-linearly between nodes (or, for the
// fractional integral only, piecewise-constant with the right-endpoint value)
// and every kernel moment over a subinterval is integrated in closed form.
//
//   I^b h(t)       = 1/G(b)     int_0^t (t-s)^(b-1) h(s) ds
//   C D^b h(t)     = 1/G(1-b)   int_0^t (t-s)^(-b)  h'(s) ds
//   RL D^(1-b) h   = d/dt I^b h = C D^(1-b) h + h(0) t^(b-1) / G(b)
//
// Delayed variants replace the lower limit 0 by an arbitrary origin time that
// need not be a grid node.

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fstefan/gamma.hpp"
#include "fstefan/time_grid.hpp"

namespace fstefan {

enum class Reconstruction { linear, right_constant };
enum class KernelKind { integral, caputo };

/// Values of h at the nodes of a grid; values[k] is h(t_k).
struct SampledHistory {
  const TimeGrid* grid = nullptr;
  std::span<const double> values;
  std::size_t origin_index = 0;
};

/// Lower limit of a delayed operator placed at an arbitrary time, with the
/// history value there (for the front-tracking use this is T = 0).
struct Origin {
  double time = 0.0;
  double value = 0.0;
};

namespace detail {

inline void check_order(double beta) {
  if (!(beta > 0.0 && beta < 1.0)) {
    throw std::domain_error("fractional order must lie in (0,1), got " + std::to_string(beta));
  }
}

inline void check_history(const SampledHistory& h, std::size_t n) {
  if (h.grid == nullptr) throw std::invalid_argument("SampledHistory without a grid");
  if (n >= h.grid->size()) throw std::out_of_range("time index beyond the grid");
  if (h.values.size() <= n) throw std::out_of_range("history shorter than the requested index");
}

// Coefficients (left, right) such that the contribution of the subinterval
// [lo, hi] to the operator evaluated at t is left*h(lo) + right*h(hi).
// Gamma factors are included. Requires lo < hi <= t.
inline std::pair<double, double> interval_weights(KernelKind kind, Reconstruction recon,
                                                  double beta, double t, double lo, double hi) {
  const double a = t - hi;
  const double b = t - lo;
  const double width = hi - lo;
  if (kind == KernelKind::caputo) {
    const double e = 1.0 - beta;
    const double c = (std::pow(b, e) - std::pow(a, e)) / (width * gamma_fn(2.0 - beta));
    return {-c, c};
  }
  const double m0 = (std::pow(b, beta) - std::pow(a, beta)) / beta;
  const double g = gamma_fn(beta);
  if (recon == Reconstruction::right_constant) return {0.0, m0 / g};
  const double m1 = (std::pow(b, beta + 1.0) - std::pow(a, beta + 1.0)) / (beta + 1.0);
  return {(m1 - a * m0) / (width * g), (b * m0 - m1) / (width * g)};
}

// Evaluates the operator at t = knots.back() for a piecewise history on
// arbitrary knots. Zero-length leading intervals are skipped.
inline double evaluate_on_knots(KernelKind kind, Reconstruction recon, double beta,
                                std::span<const double> knots, std::span<const double> vals) {
  const double t = knots.back();
  double acc = 0.0;
  for (std::size_t j = 0; j + 1 < knots.size(); ++j) {
    if (!(knots[j + 1] > knots[j])) continue;
    const auto [l, r] = interval_weights(kind, recon, beta, t, knots[j], knots[j + 1]);
    acc += l * vals[j] + r * vals[j + 1];
  }
  return acc;
}

// Knots (origin.time, t_{k0+1}, ..., t_n) and matching values.
inline std::pair<std::vector<double>, std::vector<double>> delayed_knots(const SampledHistory& h,
                                                                         Origin origin,
                                                                         std::size_t n) {
  const TimeGrid& g = *h.grid;
  if (origin.time < 0.0 || origin.time > g[n]) {
    throw std::invalid_argument("delayed operator origin must lie in [0, t_n]");
  }
  std::vector<double> knots{origin.time};
  std::vector<double> vals{origin.value};
  if (origin.time == g[n]) return {knots, vals};
  const std::size_t k0 = g.interval_of(origin.time);
  if (k0 + 1 < h.origin_index) {
    throw std::out_of_range("delayed origin precedes the recorded history");
  }
  knots.reserve(n - k0 + 1);
  vals.reserve(n - k0 + 1);
  for (std::size_t k = k0 + 1; k <= n; ++k) {
    knots.push_back(g[k]);
    vals.push_back(h.values[k]);
  }
  return {knots, vals};
}

inline Origin node_origin(const SampledHistory& h, std::size_t origin) {
  return {(*h.grid)[origin], h.values[origin]};
}

}  // namespace detail

/// Riemann-Liouville fractional integral of order beta from 0 at node n.
inline double frac_integral(const SampledHistory& h, double beta, std::size_t n,
                            Reconstruction recon = Reconstruction::linear) {
  detail::check_order(beta);
  detail::check_history(h, n);
  if (h.origin_index != 0) throw std::invalid_argument("frac_integral: history must start at 0");
  const auto& nodes = h.grid->nodes();
  return detail::evaluate_on_knots(KernelKind::integral, recon, beta,
                                   std::span(nodes).first(n + 1), h.values.first(n + 1));
}

/// L1 Caputo derivative of order beta from 0 at node n.
inline double caputo_l1(const SampledHistory& h, double beta, std::size_t n) {
  detail::check_order(beta);
  detail::check_history(h, n);
  if (h.origin_index != 0) throw std::invalid_argument("caputo_l1: history must start at 0");
  const auto& nodes = h.grid->nodes();
  return detail::evaluate_on_knots(KernelKind::caputo, Reconstruction::linear, beta,
                                   std::span(nodes).first(n + 1), h.values.first(n + 1));
}

/// Fractional integral with lower limit at an arbitrary origin time.
inline double delayed_integral(const SampledHistory& h, double beta, Origin origin, std::size_t n,
                               Reconstruction recon = Reconstruction::linear) {
  detail::check_order(beta);
  detail::check_history(h, n);
  const auto [knots, vals] = detail::delayed_knots(h, origin, n);
  return detail::evaluate_on_knots(KernelKind::integral, recon, beta, knots, vals);
}

inline double delayed_caputo(const SampledHistory& h, double beta, Origin origin, std::size_t n) {
  detail::check_order(beta);
  detail::check_history(h, n);
  const auto [knots, vals] = detail::delayed_knots(h, origin, n);
  return detail::evaluate_on_knots(KernelKind::caputo, Reconstruction::linear, beta, knots, vals);
}

inline double delayed_caputo(const SampledHistory& h, double beta, std::size_t origin,
                             std::size_t n) {
  if (origin > n) throw std::invalid_argument("delayed_caputo: origin index after evaluation index");
  detail::check_history(h, n);
  return delayed_caputo(h, beta, detail::node_origin(h, origin), n);
}

/// d/dt of the order-beta integral taken from the origin, i.e. the
/// Riemann-Liouville derivative of order 1 - beta. Evaluated through the
/// Caputo form plus the singular origin term.
inline double delayed_rl(const SampledHistory& h, double beta, Origin origin, std::size_t n) {
  detail::check_order(beta);
  detail::check_history(h, n);
  const double span_t = (*h.grid)[n] - origin.time;
  if (!(span_t > 0.0)) {
    throw std::domain_error("Riemann-Liouville derivative is singular at its lower limit");
  }
  const double singular =
      origin.value == 0.0 ? 0.0 : origin.value * std::pow(span_t, beta - 1.0) / gamma_fn(beta);
  return delayed_caputo(h, 1.0 - beta, origin, n) + singular;
}

inline double delayed_rl(const SampledHistory& h, double beta, std::size_t origin, std::size_t n) {
  if (origin > n) throw std::invalid_argument("delayed_rl: origin index after evaluation index");
  detail::check_history(h, n);
  return delayed_rl(h, beta, detail::node_origin(h, origin), n);
}

inline double rl_derivative(const SampledHistory& h, double beta, std::size_t n) {
  if (n == 0) throw std::domain_error("rl_derivative: kernel is singular at t = 0, need n >= 1");
  if (h.origin_index != 0) throw std::invalid_argument("rl_derivative: history must start at 0");
  return delayed_rl(h, beta, std::size_t{0}, n);
}

/// Precomputed interval coefficients for one (grid, beta, kind) triple.
///
/// Uniform grids store a single Toeplitz row; other grids store the full
/// lower-triangular table, O(N^2) memory. apply() is the only evaluation entry
/// point, so a compressed (sum-of-exponentials) history would replace it alone.
class KernelWeights {
 public:
  KernelWeights(TimeGrid grid, double beta, KernelKind kind,
                Reconstruction recon = Reconstruction::linear)
      : grid_(std::move(grid)), beta_(beta), kind_(kind), recon_(recon) {
    detail::check_order(beta);
    const std::size_t steps = grid_.steps();
    toeplitz_ = grid_.is_uniform();
    if (toeplitz_) {
      const double h = grid_.t_end() / static_cast<double>(steps);
      table_.resize(steps);
      for (std::size_t m = 0; m < steps; ++m) {
        // a = t - hi = m*h, b = t - lo = (m+1)*h
        table_[m] = detail::interval_weights(kind, recon, beta, static_cast<double>(m + 1) * h,
                                             0.0, h);
      }
    } else {
      table_.resize(steps * (steps + 1) / 2);
      for (std::size_t n = 1; n <= steps; ++n) {
        for (std::size_t k = 0; k < n; ++k) {
          table_[row_offset(n) + k] =
              detail::interval_weights(kind, recon, beta, grid_[n], grid_[k], grid_[k + 1]);
        }
      }
    }
  }

  [[nodiscard]] double beta() const { return beta_; }
  [[nodiscard]] KernelKind kind() const { return kind_; }
  [[nodiscard]] Reconstruction reconstruction() const { return recon_; }
  [[nodiscard]] const TimeGrid& grid() const { return grid_; }

  /// Coefficients of h(t_k), h(t_{k+1}) for the subinterval k at node n (k < n).
  [[nodiscard]] std::pair<double, double> interval(std::size_t n, std::size_t k) const {
    return toeplitz_ ? table_[n - k - 1] : table_[row_offset(n) + k];
  }

  /// Operator at node n with lower limit at node `origin`.
  [[nodiscard]] double apply(std::span<const double> values, std::size_t n,
                             std::size_t origin = 0) const {
    if (n > grid_.steps() || values.size() <= n) throw std::out_of_range("KernelWeights::apply");
    if (origin > n) throw std::invalid_argument("KernelWeights::apply: origin after n");
    double acc = 0.0;
    for (std::size_t k = origin; k < n; ++k) {
      const auto [l, r] = interval(n, k);
      acc += l * values[k] + r * values[k + 1];
    }
    return acc;
  }

 private:
  static std::size_t row_offset(std::size_t n) { return (n - 1) * n / 2; }

  TimeGrid grid_;
  double beta_;
  KernelKind kind_;
  Reconstruction recon_;
  bool toeplitz_ = false;
  std::vector<std::pair<double, double>> table_;
};

}  // namespace fstefan
