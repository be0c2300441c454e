#include "heatctl/admissible.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace heatctl {

BoundProfile::BoundProfile(std::vector<double> breakpoints, std::vector<double> values)
    : breakpoints_(std::move(breakpoints)), values_(std::move(values)) {
  if (values_.empty() || breakpoints_.size() != values_.size() + 1) {
    throw InvalidArgument("bound profile: need m+1 breakpoints for m values");
  }
  if (breakpoints_.front() != 0.0) throw InvalidArgument("bound profile: first breakpoint must be 0");
  for (std::size_t i = 0; i + 1 < breakpoints_.size(); ++i) {
    if (!(breakpoints_[i] < breakpoints_[i + 1])) throw InvalidArgument("bound profile: breakpoints must increase");
  }
  for (double v : values_) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw InvalidArgument("bound profile: values must be finite and >= 0");
  }
}

BoundProfile BoundProfile::constant(double horizon, double value) { return BoundProfile({0.0, horizon}, {value}); }

double BoundProfile::sup() const { return *std::max_element(values_.begin(), values_.end()); }
double BoundProfile::inf() const { return *std::min_element(values_.begin(), values_.end()); }

std::size_t BoundProfile::piece_at(double t) const {
  auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), t);
  auto idx = static_cast<std::size_t>(std::distance(breakpoints_.begin(), it));
  return std::min(idx == 0 ? 0 : idx - 1, values_.size() - 1);
}

double bound_at(const BoundProfile& bound, double t) {
  if (!(t >= 0.0) || !(t < bound.horizon())) throw InvalidArgument("bound_at: t outside [0, T)");
  return bound.values()[bound.piece_at(t)];
}

double step_bound(const BoundProfile& bound, const ControlProfile& u, std::size_t i, double tau) {
  const double s0 = std::max(u.step_start(i), tau);
  const double s1 = u.step_end(i);
  if (s1 <= s0) return 0.0;
  return bound.values()[bound.piece_at(0.5 * (s0 + s1))];
}

double membership_residual(const ControlProfile& u, const BoundProfile& bound) {
  double worst = 0.0;
  for (std::size_t i = 0; i < u.steps(); ++i) {
    const double m = step_bound(bound, u, i);
    const double norm = u.step_norm(i);
    if (m == 0.0) {
      if (norm > 0.0) return std::numeric_limits<double>::infinity();
      continue;
    }
    worst = std::max(worst, std::max(norm - m, 0.0) / m);
  }
  return worst;
}

}  // namespace heatctl
