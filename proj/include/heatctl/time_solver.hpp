#pragma once

// Optimal time  tau(eps) = sup { tau : some admissible control started at tau
// steers y(T) into the closed ball of radius eps }, found by bisection on the
// monotone predicate eps(tau) <= eps.

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "heatctl/target_solver.hpp"

namespace heatctl {

class InfeasibleTarget : public std::runtime_error {
public:
  InfeasibleTarget(double eps, double eps0);
  double eps() const { return eps_; }
  double eps0() const { return eps0_; }

private:
  double eps_;
  double eps0_;
};

struct TimeOptions {
  double tau_tol = 1e-4;  // fraction of T
  DualOptions dual;

  static TimeOptions from(const Problem& problem);
};

struct TimeSolution {
  double tau = 0.0;
  double eps_target = 0.0;
  double eps_at_tau = 0.0;
  TargetSolution target;
  // Certified bracket: eps(bracket_lo) <= eps_target < eps(bracket_hi).
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  double eps_lo = 0.0;
  double eps_hi = 0.0;
  double bracket_width = 0.0;
  bool saturated = false;
  std::size_t evaluations = 0;
  std::size_t monotonicity_violations = 0;
  bool converged = true;
};

// Right-end guard: tau never exceeds T - right_guard(T).
double right_guard(double horizon);

TimeSolution solve_tau(double eps, const Problem& problem);
TimeSolution solve_tau(double eps, const Problem& problem, const TimeOptions& opts);

struct CurvePoint {
  double tau = 0.0;
  double eps = 0.0;
  bool converged = false;
};

struct CurveReport {
  std::vector<CurvePoint> points;
  double eps_T = 0.0;
  bool degenerate = false;        // eps(tau) == eps_T everywhere (M = 0)
  bool all_converged = true;
  double max_violation = 0.0;     // max over i of eps_i - eps_{i+1}, clipped at 0
  std::size_t strict_increases = 0;  // differences > 1e-6 eps_T
  double lipschitz_constant = 0.0;   // sup M * max node operator norm
  double max_slope = 0.0;
  bool monotone = true;
  bool lipschitz_ok = true;
};

// sup M * max over quadrature nodes of ||G^{1/2} e^{Delta (T - s)}||.
double lipschitz_bound(const Problem& problem);

// Solves eps at each grid point with at most `workers` threads (0 = hardware
// concurrency). Result order follows the input grid.
CurveReport eps_curve(std::span<const double> taus, const Problem& problem, const DualOptions& opts,
                      std::size_t workers = 0);
CurveReport eps_curve(std::span<const double> taus, const Problem& problem);

struct InverseProbe {
  double input = 0.0;
  double image = 0.0;      // eps(tau) or tau(eps)
  double round_trip = 0.0; // tau(eps(tau)) or eps(tau(eps))
  double residual = 0.0;
};

struct InverseReport {
  bool degenerate = false;
  double eps0 = 0.0;
  double eps_T = 0.0;
  std::vector<InverseProbe> tau_probes;
  std::vector<InverseProbe> eps_probes;
  double max_tau_residual = 0.0;
  double max_eps_residual = 0.0;
};

// Probes tau_j = j T / n and eps_j = eps(0) + j (eps_T - eps(0)) / n, j = 0..n-1.
InverseReport verify_inverse(const Problem& problem, std::size_t n_probes, const TimeOptions& opts);
InverseReport verify_inverse(const Problem& problem, std::size_t n_probes);

}  // namespace heatctl
