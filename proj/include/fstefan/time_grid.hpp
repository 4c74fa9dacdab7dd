#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace fstefan {

struct Grading {
  enum class Kind { uniform, graded };
  Kind kind = Kind::uniform;
  double exponent = 1.0;  // only meaningful for graded

  static Grading uniform() { return {}; }
  static Grading graded(double r) { return {Kind::graded, r}; }
  // Resolves the t^beta behaviour near t = 0.
  static Grading graded_for(double beta) { return {Kind::graded, 2.0 / beta}; }

  friend bool operator==(const Grading&, const Grading&) = default;
};

/// Strictly increasing time nodes 0 = t_0 < ... < t_N = t_end.
class TimeGrid {
 public:
  TimeGrid(double t_end, std::size_t steps, Grading grading = Grading::uniform())
      : grading_(grading) {
    if (!(t_end > 0.0) || !std::isfinite(t_end)) {
      throw std::invalid_argument("TimeGrid: t_end must be positive");
    }
    if (steps == 0) throw std::invalid_argument("TimeGrid: need at least one step");
    if (grading.kind == Grading::Kind::graded && !(grading.exponent >= 1.0)) {
      throw std::invalid_argument("TimeGrid: grading exponent must be >= 1");
    }
    nodes_.resize(steps + 1);
    const double n_steps = static_cast<double>(steps);
    for (std::size_t n = 0; n <= steps; ++n) {
      const double u = static_cast<double>(n) / n_steps;
      nodes_[n] = grading.kind == Grading::Kind::uniform ? t_end * u
                                                         : t_end * std::pow(u, grading.exponent);
    }
    nodes_.back() = t_end;
  }

  // Arbitrary node list; used when ingesting trajectories from disk.
  explicit TimeGrid(std::vector<double> nodes) : nodes_(std::move(nodes)) {
    if (nodes_.size() < 2 || nodes_.front() != 0.0) {
      throw std::invalid_argument("TimeGrid: nodes must start at 0 and hold at least two entries");
    }
    for (std::size_t n = 1; n < nodes_.size(); ++n) {
      if (!(nodes_[n] > nodes_[n - 1])) {
        throw std::invalid_argument("TimeGrid: nodes must be strictly increasing");
      }
    }
    grading_.kind = detect_uniform() ? Grading::Kind::uniform : Grading::Kind::graded;
  }

  [[nodiscard]] std::size_t steps() const { return nodes_.size() - 1; }
  [[nodiscard]] std::size_t size() const { return nodes_.size(); }
  [[nodiscard]] double operator[](std::size_t n) const { return nodes_[n]; }
  [[nodiscard]] double t_end() const { return nodes_.back(); }
  [[nodiscard]] double dt(std::size_t n) const { return nodes_[n] - nodes_[n - 1]; }
  [[nodiscard]] const std::vector<double>& nodes() const { return nodes_; }
  [[nodiscard]] const Grading& grading() const { return grading_; }
  [[nodiscard]] bool is_uniform() const { return grading_.kind == Grading::Kind::uniform; }

  // Index k such that t lies in (t_k, t_{k+1}]; t <= 0 maps to 0.
  [[nodiscard]] std::size_t interval_of(double t) const {
    if (t <= nodes_.front()) return 0;
    std::size_t lo = 0, hi = nodes_.size() - 1;
    if (t >= nodes_[hi]) return hi - 1;
    while (hi - lo > 1) {
      const std::size_t mid = (lo + hi) / 2;
      if (nodes_[mid] < t) lo = mid; else hi = mid;
    }
    return lo;
  }

  friend bool operator==(const TimeGrid& a, const TimeGrid& b) { return a.nodes_ == b.nodes_; }

 private:
  bool detect_uniform() const {
    const double h = nodes_[1] - nodes_[0];
    for (std::size_t n = 1; n < nodes_.size(); ++n) {
      if (std::abs((nodes_[n] - nodes_[n - 1]) - h) > 1e-12 * nodes_.back()) return false;
    }
    return true;
  }

  std::vector<double> nodes_;
  Grading grading_;
};

}  // namespace fstefan
