#pragma once

// Time-varying pointwise bound M(t) and membership of controls in the
// admissible set  { u : ||u(t)|| <= M(t) for a.e. t }.

#include <cstddef>
#include <vector>

#include "heatctl/spectral.hpp"

namespace heatctl {

// Piecewise-constant M on [0, T]: values[i] holds on [breakpoints[i], breakpoints[i+1]).
// Right-continuous at breakpoints. Values must be >= 0; an identically zero
// profile is the degenerate "no control" case and is flagged by positive().
class BoundProfile {
public:
  BoundProfile(std::vector<double> breakpoints, std::vector<double> values);

  static BoundProfile constant(double horizon, double value);
  // Samples f at the midpoints of `pieces` equal pieces.
  template <typename F>
  static BoundProfile sampled(double horizon, std::size_t pieces, F&& f) {
    std::vector<double> bps = uniform_grid(horizon, pieces);
    std::vector<double> vals(pieces);
    for (std::size_t i = 0; i < pieces; ++i) vals[i] = f(0.5 * (bps[i] + bps[i + 1]));
    return BoundProfile(std::move(bps), std::move(vals));
  }

  double horizon() const { return breakpoints_.back(); }
  std::size_t pieces() const { return values_.size(); }
  const std::vector<double>& breakpoints() const { return breakpoints_; }
  const std::vector<double>& values() const { return values_; }
  double sup() const;
  double inf() const;
  bool positive() const { return inf() > 0.0; }
  bool identically_zero() const { return sup() == 0.0; }

  // Index of the piece containing t, right-continuous.
  std::size_t piece_at(double t) const;

  friend bool operator==(const BoundProfile&, const BoundProfile&) = default;

private:
  std::vector<double> breakpoints_;
  std::vector<double> values_;
};

double bound_at(const BoundProfile& bound, double t);

// M evaluated at the midpoint of step i clipped to (tau, T); 0 for steps that
// end before tau.
double step_bound(const BoundProfile& bound, const ControlProfile& u, std::size_t i, double tau = 0.0);

// max_i (||u_i|| - M_i)_+ / M_i with M_i taken at step midpoints; 0 iff u is
// admissible on the grid. A step with M_i = 0 and u_i != 0 yields +inf.
double membership_residual(const ControlProfile& u, const BoundProfile& bound);

}  // namespace heatctl
