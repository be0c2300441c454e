#pragma once

// Checks that an optimal control saturates the time-varying bound,
// ||u*(t)|| = M(t) on (tau, T), and that independently computed optima agree.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "heatctl/time_solver.hpp"

namespace heatctl {

struct StepResidual {
  std::size_t step = 0;
  double time = 0.0;  // step midpoint
  double norm = 0.0;
  double bound = 0.0;
  double residual = 0.0;  // | ||u_i|| - M_i | / M_i
};

struct BangBangReport {
  bool skipped = false;
  std::string skip_reason;
  double threshold = 1e-3;
  std::vector<StepResidual> steps;
  double residual_max = 0.0;
  double residual_median = 0.0;

  bool pass() const { return skipped || residual_max <= threshold; }
};

// Residuals over steps lying entirely inside (tau, T); the step straddling tau is
// the one-step pad. Skipped for interior (eps = 0) solutions and zero bounds.
BangBangReport bang_bang_check(const ControlProfile& control, double tau, const BoundProfile& bound,
                               bool interior = false, double threshold = 1e-3);
BangBangReport bang_bang_check(const TargetSolution& solution, const Problem& problem, double threshold = 1e-3);
BangBangReport bang_bang_check(const TimeSolution& solution, const Problem& problem, double threshold = 1e-3);

// (sum_i dt_i ||a_i - b_i||^2)^{1/2}
double control_distance(const ControlProfile& a, const ControlProfile& b);

struct UniquenessReport {
  double dual_gap = 0.0;    // max pairwise gap among the dual runs
  double oracle_gap = 0.0;  // max gap between a dual run and the oracle optimum
  double max_gap = 0.0;
  std::vector<TargetSolution> runs;
};

// One dual solve per seed (random initial direction), optionally compared with
// the transcription oracle. Throws if any run fails to converge.
UniquenessReport uniqueness_check(double tau, const Problem& problem, std::span<const std::uint64_t> seeds,
                                  bool include_oracle = true);
// Seeds scenario.seed, scenario.seed + 1, ...
UniquenessReport uniqueness_check(double tau, const Problem& problem, std::size_t n_runs, bool include_oracle = true);

}  // namespace heatctl
