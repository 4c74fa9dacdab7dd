#pragma once

// Conservative enthalpy scheme for the one-phase melting problem with a
// memory (Riemann-Liouville) flux.
//
// Over one step the cell balance d/dt int E = q(left) - q(right) integrates
// exactly against the flux q = -d/dt J, J = I^beta T_x, so
//
//   E_i^n = E_i^{n-1} + (dJ_{i+1/2} - dJ_{i-1/2}) / dx + S_i,
//   dJ_f  = J_f(t_n) - J_f(t_{n-1}).
//
// J is the fractional integral of the face-gradient history with a
// right-endpoint (implicit) piecewise-constant reconstruction: the current
// gradient enters with weight c_f, older gradients form the explicit part H_f.
// At beta = 1 this is the backward-Euler enthalpy scheme. Faces right of
// s(0) start their history at the time the front crossed them.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "fstefan/domain.hpp"
#include "fstefan/fracops.hpp"
#include "fstefan/gamma.hpp"
#include "fstefan/time_grid.hpp"

namespace fstefan {

struct SolverOptions {
  int max_iter = 200;
  double tolerance = 1e-12;
};

class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(std::size_t step, double residual)
      : std::runtime_error("closure iteration did not converge at step " + std::to_string(step) +
                           " (last update " + std::to_string(residual) + ")"),
        step_(step),
        residual_(residual) {}
  [[nodiscard]] std::size_t step() const { return step_; }
  [[nodiscard]] double residual() const { return residual_; }

 private:
  std::size_t step_;
  double residual_;
};

/// Full history of a run. Row n of every table belongs to time t_n.
struct SolutionRecord {
  ModelParams params;
  ProblemData data;
  TimeGrid grid{1.0, 1};
  SpaceGrid space;
  std::vector<std::vector<double>> temperature;  // cells
  std::vector<std::vector<double>> enthalpy;     // cells
  std::vector<std::vector<double>> gradient;     // faces, T_x
  std::vector<std::vector<double>> flux;         // faces, mean q* over (t_{n-1}, t_n]
  std::vector<std::vector<double>> source;       // cells, int_cell int_0^t F
  InterfacePath path;
  std::vector<FrontLocation> fronts;
  std::vector<double> balance_residual;
  std::vector<int> iterations;
  bool reached_boundary = false;

  [[nodiscard]] std::size_t last() const { return path.size() - 1; }
  [[nodiscard]] double time(std::size_t n) const { return grid[n]; }
};

/// Face gradient as an affine form in the neighbouring cell temperatures:
/// g_f = left * T_{f-1} + right * T_f + shift.
struct FaceStencil {
  double left = 0.0;
  double right = 0.0;
  double shift = 0.0;
};

namespace detail {

inline std::size_t pinned_cell(const ModelParams& p, const SpaceGrid& g) {
  const double u = p.x0 / g.dx();
  const double m = std::round(u);
  if (std::abs(u - m) > 1e-9 || m < 2.0) {
    throw ParamError("x0", "a pinned front needs x0 on a cell edge with at least two liquid cells");
  }
  return static_cast<std::size_t>(m);
}

inline double front_position(std::span<const double> e, const SpaceGrid& g) {
  std::size_t j = 0;
  while (j < e.size() && e[j] >= 1.0) ++j;
  if (j == e.size()) return g.length;
  return (static_cast<double>(j) + std::clamp(e[j], 0.0, 1.0)) * g.dx();
}

// Thomas algorithm; sub[0] and sup[n-1] are ignored.
inline std::vector<double> solve_tridiagonal(std::vector<double> sub, std::vector<double> diag,
                                             std::vector<double> sup, std::vector<double> rhs) {
  const std::size_t n = diag.size();
  for (std::size_t i = 1; i < n; ++i) {
    const double w = sub[i] / diag[i - 1];
    diag[i] -= w * sup[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  std::vector<double> x(n);
  x[n - 1] = rhs[n - 1] / diag[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) x[i] = (rhs[i] - sup[i] * x[i + 1]) / diag[i];
  return x;
}

}  // namespace detail

inline FaceStencil face_stencil(const ModelParams& p, const ProblemData& d, const SpaceGrid& g,
                                std::size_t f, double t) {
  const double dx = g.dx();
  if (d.pin_front) {
    const std::size_t m = detail::pinned_cell(p, g);
    if (f == m) return {-2.0 / dx, 0.0, 0.0};
    if (f > m) return {};
  }
  if (f == 0) {
    if (p.bc_kind == BoundaryKind::dirichlet) return {0.0, 2.0 / dx, -2.0 * d.boundary(t) / dx};
    return {0.0, 0.0, d.boundary(t)};
  }
  if (f == g.cells) return {};
  return {-1.0 / dx, 1.0 / dx, 0.0};
}

inline std::vector<double> face_gradients(const ModelParams& p, const ProblemData& d,
                                          const SpaceGrid& g, std::span<const double> temperature,
                                          double t) {
  std::vector<double> out(g.faces(), 0.0);
  for (std::size_t f = 0; f < g.faces(); ++f) {
    const FaceStencil st = face_stencil(p, d, g, f, t);
    const double tl = f > 0 ? temperature[f - 1] : 0.0;
    const double tr = f < g.cells ? temperature[f] : 0.0;
    out[f] = st.left * tl + st.right * tr + st.shift;
  }
  return out;
}

/// Implicit weight and explicit history part of dJ per face: dJ = c*g^n + H.
struct FluxSplit {
  std::vector<double> implicit_weight;
  std::vector<double> explicit_part;
};

class SolverState {
 public:
  SolverState(ModelParams params, ProblemData data, SolverOptions options = {})
      : options_(options),
        weights_(make_weights(params)) {
    if (!data.boundary || !data.initial) {
      const ProblemData defaults = standard_data(params);
      if (!data.boundary) data.boundary = defaults.boundary;
      if (!data.initial) data.initial = defaults.initial;
    }
    rec_.params = params;
    rec_.data = std::move(data);
    rec_.grid = weights_->grid();
    rec_.space = {params.length, params.nx};
    const SpaceGrid& g = rec_.space;
    if (rec_.data.pin_front) pinned_ = detail::pinned_cell(params, g);

    const FrontLocation front = front_from_position(g, params.x0);
    std::vector<double> t0(g.cells, 0.0);
    for (std::size_t i = 0; i < front.cell && i < g.cells; ++i) {
      t0[i] = std::max(rec_.data.initial(g.center(i)), 0.0);
    }
    std::vector<double> e = enthalpy_from_temperature(t0, front);
    push_row(std::move(t0), std::move(e), front, std::vector<double>(g.faces(), 0.0),
             std::vector<double>(g.cells, 0.0), 0.0, 0);
    rec_.path = InterfacePath(0.0, params.x0);

    arrival_.assign(g.faces(), std::numeric_limits<double>::quiet_NaN());
    arrival_interval_.assign(g.faces(), 0);
    for (std::size_t f = 0; f < g.faces(); ++f) {
      if (g.face(f) <= params.x0) arrival_[f] = 0.0;  // history from t = 0
    }
  }

  [[nodiscard]] std::size_t index() const { return rec_.last(); }
  [[nodiscard]] bool finished() const {
    return rec_.reached_boundary || index() >= rec_.grid.steps();
  }
  [[nodiscard]] const SolutionRecord& record() const { return rec_; }
  SolutionRecord take_record() && { return std::move(rec_); }
  [[nodiscard]] const ModelParams& params() const { return rec_.params; }
  [[nodiscard]] const KernelWeights& weights() const { return *weights_; }

  /// Splits dJ at step n (the step being computed, n = index() + 1) given a
  /// trial front position s_trial at t_n.
  [[nodiscard]] FluxSplit assemble_flux(std::size_t n, double s_trial) const {
    const SpaceGrid& g = rec_.space;
    const TimeGrid& tg = rec_.grid;
    const std::size_t faces = g.faces();
    const double beta = rec_.params.beta;
    const double gamma1 = gamma_fn(beta + 1.0);
    FluxSplit out{std::vector<double>(faces, 0.0), std::vector<double>(faces, 0.0)};

    // Explicit history, k outer so that gradient rows are read contiguously.
    auto& h = out.explicit_part;
    for (std::size_t k = 0; k + 1 < n; ++k) {
      const double w = weights_->interval(n, k).second - weights_->interval(n - 1, k).second;
      const auto& gk = rec_.gradient[k + 1];
      for (std::size_t f = 0; f < faces; ++f) h[f] += w * gk[f];
    }

    auto partial = [&](std::size_t m, double origin, std::size_t ka) {
      return (std::pow(tg[m] - origin, beta) - std::pow(tg[m] - tg[ka + 1], beta)) / gamma1;
    };
    const double s_prev = rec_.path.current();
    for (std::size_t f = 0; f < faces; ++f) {
      if (!std::isnan(arrival_[f])) {
        out.implicit_weight[f] = weights_->interval(n, n - 1).second;
        if (arrival_[f] > 0.0) {
          // The arrival interval only counts from the crossing time.
          const std::size_t ka = arrival_interval_[f];
          const double corr = (partial(n, arrival_[f], ka) - weights_->interval(n, ka).second) -
                              (partial(n - 1, arrival_[f], ka) - weights_->interval(n - 1, ka).second);
          h[f] += corr * rec_.gradient[ka + 1][f];
        }
      } else if (s_trial >= g.face(f) && s_trial > s_prev) {
        const double origin =
            InterfacePath::inverse_on_segment(tg[n - 1], tg[n], s_prev, s_trial, g.face(f));
        out.implicit_weight[f] = std::pow(tg[n] - origin, beta) / gamma1;
      }
    }
    return out;
  }

  /// Advances one step. Throws ConvergenceError if the closure iteration stalls.
  void step() {
    if (finished()) throw std::logic_error("SolverState::step called after the run finished");
    const std::size_t n = index() + 1;
    const SpaceGrid& g = rec_.space;
    const TimeGrid& tg = rec_.grid;
    const ModelParams& p = rec_.params;
    const std::size_t cells = g.cells;
    const std::size_t faces = g.faces();
    const double dx = g.dx();
    const double tn = tg[n];
    const std::size_t active = pinned_ ? pinned_ : cells;

    const std::vector<double>& e_prev = rec_.enthalpy[n - 1];
    std::vector<double> source_cum(cells, 0.0);
    std::vector<double> src(cells, 0.0);
    if (rec_.data.cumulative_source) {
      for (std::size_t i = 0; i < active; ++i) {
        source_cum[i] = rec_.data.cumulative_source(g.face(i), g.face(i + 1), tn);
        src[i] = (source_cum[i] - rec_.source[n - 1][i]) / dx;
      }
    }
    std::vector<FaceStencil> stencil(faces);
    for (std::size_t f = 0; f < faces; ++f) stencil[f] = face_stencil(p, rec_.data, g, f, tn);

    std::vector<double> e_it = e_prev;
    std::vector<double> t_it = rec_.temperature[n - 1];
    double s_it = rec_.path.current();
    double s_flux = s_it;  // front position the accepted fluxes were built with
    FluxSplit split;
    std::vector<double> dj(faces, 0.0);
    double update = std::numeric_limits<double>::infinity();
    int iter = 0;
    for (; iter < options_.max_iter; ++iter) {
      s_flux = s_it;
      split = assemble_flux(n, s_it);
      const auto& c = split.implicit_weight;
      const auto& hist = split.explicit_part;

      std::vector<double> sub(cells, 0.0), diag(cells, 1.0), sup(cells, 0.0), rhs(cells, 0.0);
      for (std::size_t i = 0; i < active; ++i) {
        const bool liquid = pinned_ ? true : e_it[i] > 1.0;
        if (!liquid) continue;
        const FaceStencil& w = stencil[i];
        const FaceStencil& e = stencil[i + 1];
        sub[i] = c[i] * w.left / dx;
        diag[i] = 1.0 - c[i + 1] * e.left / dx + c[i] * w.right / dx;
        sup[i] = -c[i + 1] * e.right / dx;
        rhs[i] = e_prev[i] - 1.0 + src[i] +
                 (c[i + 1] * e.shift + hist[i + 1] - c[i] * w.shift - hist[i]) / dx;
      }
      std::vector<double> t_new = detail::solve_tridiagonal(sub, diag, sup, rhs);

      for (std::size_t f = 0; f < faces; ++f) {
        const double tl = f > 0 ? t_new[f - 1] : 0.0;
        const double tr = f < cells ? t_new[f] : 0.0;
        const FaceStencil& st = stencil[f];
        dj[f] = c[f] * (st.left * tl + st.right * tr + st.shift) + hist[f];
      }
      std::vector<double> e_new = e_prev;
      for (std::size_t i = 0; i < active; ++i) {
        e_new[i] = e_prev[i] + (dj[i + 1] - dj[i]) / dx + src[i];
      }

      update = 0.0;
      for (std::size_t i = 0; i < cells; ++i) {
        update = std::max({update, std::abs(t_new[i] - t_it[i]), std::abs(e_new[i] - e_it[i])});
      }
      t_it = std::move(t_new);
      e_it = std::move(e_new);
      s_it = pinned_ ? p.x0 : detail::front_position(e_it, g);
      if (update <= options_.tolerance) break;
    }
    if (!(update <= options_.tolerance)) throw ConvergenceError(n, update);

    // Stored T is the linear-solve iterate that built the fluxes, so recorded
    // gradients reproduce dJ exactly. It matches max(E - 1, 0) up to the
    // rounding of the solve (diagonal ~ 1 + 2c/dx^2); solid cells are exactly 0.
    std::vector<double> temperature(cells, 0.0);
    FrontLocation front;
    if (pinned_) {
      for (std::size_t i = 0; i < active; ++i) temperature[i] = t_it[i];
      front = rec_.fronts.back();
    } else {
      const ClosureResult cl = temperature_from_enthalpy(e_it);
      front = cl.front;
      for (std::size_t i = 0; i < front.cell; ++i) temperature[i] = std::max(t_it[i], 0.0);
    }

    double lhs = 0.0, total = 0.0, sources = 0.0;
    for (std::size_t i = 0; i < cells; ++i) {
      lhs += (e_it[i] - e_prev[i]) * dx;
      total += std::abs(e_it[i]) * dx;
      sources += src[i] * dx;
    }
    const double boundary_flux = dj[active] - dj[0];
    const double scale = std::max({total, std::abs(dj[0]) + std::abs(dj[active]),
                                   std::numeric_limits<double>::min()});
    const double residual = std::abs(lhs - boundary_flux - sources) / scale;

    std::vector<double> q(faces, 0.0);
    const double dt = tg.dt(n);
    for (std::size_t f = 0; f < faces; ++f) q[f] = dj[f] == 0.0 ? 0.0 : -dj[f] / dt;

    // The crossing weight (t_n - origin)^beta is not Lipschitz when the front
    // just entered a face, so the path keeps the position the accepted fluxes
    // used; it differs from the closure position by at most the tolerance.
    const double s_new = pinned_ ? p.x0 : std::max(s_flux, rec_.path.current());
    const double s_old = rec_.path.current();
    for (std::size_t f = 0; f < faces; ++f) {
      const double xf = g.face(f);
      if (std::isnan(arrival_[f]) && xf > s_old && xf <= s_new) {
        arrival_[f] = InterfacePath::inverse_on_segment(tg[n - 1], tn, s_old, s_new, xf);
        arrival_interval_[f] = n - 1;
      }
    }
    rec_.path.push_back(tn, s_new);
    push_row(std::move(temperature), std::move(e_it), front, std::move(q), std::move(source_cum),
             residual, iter + 1);
    if (!pinned_ && front.cell >= cells) rec_.reached_boundary = true;
  }

 private:
  static std::shared_ptr<const KernelWeights> make_weights(const ModelParams& params) {
    params.validate();
    return std::make_shared<KernelWeights>(params.time_grid(), params.beta, KernelKind::integral,
                                           Reconstruction::right_constant);
  }

  void push_row(std::vector<double> temperature, std::vector<double> enthalpy, FrontLocation front,
                std::vector<double> flux, std::vector<double> source, double residual, int iters) {
    const std::size_t n = rec_.temperature.size();
    rec_.gradient.push_back(
        face_gradients(rec_.params, rec_.data, rec_.space, temperature, rec_.grid[n]));
    rec_.temperature.push_back(std::move(temperature));
    rec_.enthalpy.push_back(std::move(enthalpy));
    rec_.flux.push_back(std::move(flux));
    rec_.source.push_back(std::move(source));
    rec_.fronts.push_back(front);
    rec_.balance_residual.push_back(residual);
    rec_.iterations.push_back(iters);
  }

  SolverOptions options_;
  std::shared_ptr<const KernelWeights> weights_;
  SolutionRecord rec_;
  std::size_t pinned_ = 0;
  std::vector<double> arrival_;  // NaN until the front reaches the face
  std::vector<std::size_t> arrival_interval_;
};

inline SolutionRecord run(const ModelParams& params, ProblemData data = {},
                          SolverOptions options = {}) {
  SolverState state(params, std::move(data), options);
  while (!state.finished()) state.step();
  return std::move(state).take_record();
}

}  // namespace fstefan
