#pragma once

// Classical similarity solution of the one-phase melting problem with unit
// latent heat and constant wall temperature T_D (Stefan number St = T_D):
//   s(t) = 2 lambda sqrt(t),  sqrt(pi) lambda exp(lambda^2) erf(lambda) = St.

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace fstefan {

struct NeumannReference {
  double stefan_number = 0.0;
  double lambda = 0.0;
  double residual = 0.0;

  [[nodiscard]] double front(double t) const { return 2.0 * lambda * std::sqrt(t); }
  [[nodiscard]] double front_speed(double t) const { return lambda / std::sqrt(t); }
  [[nodiscard]] double temperature(double x, double t) const {
    if (x >= front(t)) return 0.0;
    return stefan_number * (1.0 - std::erf(x / (2.0 * std::sqrt(t))) / std::erf(lambda));
  }
};

inline double neumann_transcendental(double lambda, double st) {
  return std::sqrt(std::numbers::pi) * lambda * std::exp(lambda * lambda) * std::erf(lambda) - st;
}

inline NeumannReference neumann_reference(double st) {
  if (!(st > 0.0) || !std::isfinite(st)) throw std::domain_error("Stefan number must be positive");
  double lo = 0.0;
  double hi = 1.0;
  while (neumann_transcendental(hi, st) < 0.0) hi *= 2.0;
  // The left side is increasing in lambda; bisect to the last representable split.
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (neumann_transcendental(mid, st) < 0.0 ? lo : hi) = mid;
  }
  const double rl = std::abs(neumann_transcendental(lo, st));
  const double rh = std::abs(neumann_transcendental(hi, st));
  const double lambda = rl <= rh ? lo : hi;
  return {st, lambda, std::min(rl, rh)};
}

}  // namespace fstefan
