#include "heatctl/bangbang.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "heatctl/oracle.hpp"

namespace heatctl {

BangBangReport bang_bang_check(const ControlProfile& control, double tau, const BoundProfile& bound, bool interior,
                               double threshold) {
  BangBangReport report;
  report.threshold = threshold;
  if (interior) {
    report.skipped = true;
    report.skip_reason = "eps(tau) = 0: the target ball is reached in its interior";
    return report;
  }
  if (bound.identically_zero()) {
    report.skipped = true;
    report.skip_reason = "degenerate bound M = 0";
    return report;
  }
  std::vector<double> residuals;
  for (std::size_t i = 0; i < control.steps(); ++i) {
    if (control.step_start(i) < tau) continue;
    StepResidual r;
    r.step = i;
    r.time = 0.5 * (control.step_start(i) + control.step_end(i));
    r.bound = step_bound(bound, control, i);
    if (r.bound <= 0.0) continue;
    r.norm = control.step_norm(i);
    r.residual = std::abs(r.norm - r.bound) / r.bound;
    report.steps.push_back(r);
    residuals.push_back(r.residual);
  }
  if (residuals.empty()) return report;
  report.residual_max = *std::max_element(residuals.begin(), residuals.end());
  const std::size_t half = residuals.size() / 2;
  std::nth_element(residuals.begin(), residuals.begin() + static_cast<std::ptrdiff_t>(half), residuals.end());
  report.residual_median = residuals[half];
  if (residuals.size() % 2 == 0) {
    const double lower = *std::max_element(residuals.begin(), residuals.begin() + static_cast<std::ptrdiff_t>(half));
    report.residual_median = 0.5 * (report.residual_median + lower);
  }
  return report;
}

BangBangReport bang_bang_check(const TargetSolution& solution, const Problem& problem, double threshold) {
  if (!solution.converged()) throw InvalidArgument("bang_bang_check: solution did not converge");
  return bang_bang_check(solution.control, solution.tau, problem.bound(), solution.certificate.interior, threshold);
}

BangBangReport bang_bang_check(const TimeSolution& solution, const Problem& problem, double threshold) {
  return bang_bang_check(solution.target, problem, threshold);
}

double control_distance(const ControlProfile& a, const ControlProfile& b) {
  if (a.grid != b.grid || a.values.rows() != b.values.rows()) throw InvalidArgument("control_distance: grids differ");
  double total = 0.0;
  for (std::size_t i = 0; i < a.steps(); ++i) {
    const auto c = static_cast<Eigen::Index>(i);
    total += (a.step_end(i) - a.step_start(i)) * (a.values.col(c) - b.values.col(c)).squaredNorm();
  }
  return std::sqrt(total);
}

UniquenessReport uniqueness_check(double tau, const Problem& problem, std::span<const std::uint64_t> seeds,
                                  bool include_oracle) {
  if (seeds.size() < 2) throw InvalidArgument("uniqueness_check: need at least two runs");
  UniquenessReport report;
  for (std::uint64_t seed : seeds) {
    DualOptions opts = DualOptions::from(problem);
    opts.seed = seed;
    TargetSolution s = solve_eps(tau, problem, opts);
    if (!s.converged()) throw std::runtime_error("uniqueness_check: dual run did not converge");
    report.runs.push_back(std::move(s));
  }
  for (std::size_t a = 0; a < report.runs.size(); ++a) {
    for (std::size_t b = a + 1; b < report.runs.size(); ++b) {
      report.dual_gap = std::max(report.dual_gap, control_distance(report.runs[a].control, report.runs[b].control));
    }
  }
  if (include_oracle) {
    const OracleSolution oracle = oracle_eps(tau, problem);
    if (!oracle.converged) throw std::runtime_error("uniqueness_check: oracle did not converge");
    for (const auto& run : report.runs) {
      report.oracle_gap = std::max(report.oracle_gap, control_distance(run.control, oracle.control));
    }
  }
  report.max_gap = std::max(report.dual_gap, report.oracle_gap);
  return report;
}

UniquenessReport uniqueness_check(double tau, const Problem& problem, std::size_t n_runs, bool include_oracle) {
  std::vector<std::uint64_t> seeds(n_runs);
  for (std::size_t i = 0; i < n_runs; ++i) seeds[i] = problem.scenario().seed + i;
  return uniqueness_check(tau, problem, seeds, include_oracle);
}

}  // namespace heatctl
