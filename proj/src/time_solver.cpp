#include "heatctl/time_solver.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>
#include <thread>

namespace heatctl {

namespace {

std::string infeasible_message(double eps, double eps0) {
  std::ostringstream msg;
  msg.precision(17);
  msg << "infeasible target: eps = " << eps << " is below eps(0) = " << eps0;
  return msg.str();
}

}  // namespace

InfeasibleTarget::InfeasibleTarget(double eps, double eps0)
    : std::runtime_error(infeasible_message(eps, eps0)), eps_(eps), eps0_(eps0) {}

TimeOptions TimeOptions::from(const Problem& problem) {
  TimeOptions o;
  o.tau_tol = problem.tolerances().tau_tol;
  o.dual = DualOptions::from(problem);
  return o;
}

double right_guard(double horizon) { return 1e-6 * horizon; }

TimeSolution solve_tau(double eps, const Problem& problem) { return solve_tau(eps, problem, TimeOptions::from(problem)); }

TimeSolution solve_tau(double eps, const Problem& problem, const TimeOptions& opts) {
  if (!(eps > 0.0)) throw InvalidArgument("solve_tau: eps must be positive");
  const double horizon = problem.horizon();
  const double eps_T = problem.eps_T();
  const double width_goal = opts.tau_tol * horizon;
  const double slack = 1e-12 * eps_T;

  TimeSolution sol;
  sol.eps_target = eps;
  auto eval = [&](double tau) {
    ++sol.evaluations;
    TargetSolution s = solve_eps(tau, problem, opts.dual);
    if (!s.converged()) sol.converged = false;
    return s;
  };
  auto finish = [&](double tau, TargetSolution target) {
    sol.tau = tau;
    sol.eps_at_tau = target.eps;
    sol.target = std::move(target);
    sol.bracket_width = sol.bracket_hi - sol.bracket_lo;
    return sol;
  };

  const double right = horizon - right_guard(horizon);
  if (eps >= eps_T) {
    sol.saturated = true;
    sol.bracket_lo = sol.bracket_hi = right;
    TargetSolution at_right = eval(right);
    sol.eps_lo = sol.eps_hi = at_right.eps;
    return finish(right, std::move(at_right));
  }

  TargetSolution at_zero = eval(0.0);
  if (eps < at_zero.eps - slack) throw InfeasibleTarget(eps, at_zero.eps);

  double lo = 0.0;
  double eps_lo = at_zero.eps;
  double hi = right;
  TargetSolution at_right = eval(hi);
  double eps_hi = at_right.eps;
  if (eps_hi <= eps) {
    sol.saturated = true;
    sol.bracket_lo = sol.bracket_hi = hi;
    sol.eps_lo = sol.eps_hi = eps_hi;
    return finish(hi, std::move(at_right));
  }

  while (hi - lo > width_goal) {
    const double mid = 0.5 * (lo + hi);
    const double eps_mid = eval(mid).eps;
    if (eps_mid < eps_lo - slack || eps_mid > eps_hi + slack) ++sol.monotonicity_violations;
    if (eps_mid <= eps) {
      lo = mid;
      eps_lo = eps_mid;
    } else {
      hi = mid;
      eps_hi = eps_mid;
    }
  }
  sol.bracket_lo = lo;
  sol.bracket_hi = hi;
  sol.eps_lo = eps_lo;
  sol.eps_hi = eps_hi;

  // Secant point inside the certified bracket.
  double tau = lo;
  if (eps_hi > eps_lo) tau = lo + std::clamp((eps - eps_lo) / (eps_hi - eps_lo), 0.0, 1.0) * (hi - lo);
  if (tau == 0.0) return finish(0.0, std::move(at_zero));
  return finish(tau, eval(tau));
}

double lipschitz_bound(const Problem& problem) {
  return problem.bound().sup() * DualFunction(problem, 0.0).max_operator_norm();
}

CurveReport eps_curve(std::span<const double> taus, const Problem& problem) {
  return eps_curve(taus, problem, DualOptions::from(problem));
}

CurveReport eps_curve(std::span<const double> taus, const Problem& problem, const DualOptions& opts,
                      std::size_t workers) {
  for (std::size_t i = 0; i < taus.size(); ++i) {
    if (!(taus[i] >= 0.0) || !(taus[i] < problem.horizon())) throw InvalidArgument("eps_curve: grid must lie in [0, T)");
    if (i > 0 && !(taus[i] > taus[i - 1])) throw InvalidArgument("eps_curve: grid must be ascending");
  }

  CurveReport report;
  report.eps_T = problem.eps_T();
  report.points.resize(taus.size());

  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, std::max<std::size_t>(taus.size(), 1));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < taus.size(); i = next++) {
      const TargetSolution s = solve_eps(taus[i], problem, opts);
      report.points[i] = {taus[i], s.eps, s.converged()};
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }

  const double floor = 1e-6 * report.eps_T;
  report.lipschitz_constant = lipschitz_bound(problem);
  report.degenerate = problem.bound().identically_zero();
  for (std::size_t i = 0; i < report.points.size(); ++i) {
    report.all_converged = report.all_converged && report.points[i].converged;
    if (i == 0) continue;
    const double diff = report.points[i].eps - report.points[i - 1].eps;
    const double dtau = report.points[i].tau - report.points[i - 1].tau;
    report.max_violation = std::max(report.max_violation, -diff);
    if (diff > floor) ++report.strict_increases;
    report.max_slope = std::max(report.max_slope, std::abs(diff) / dtau);
    if (std::abs(diff) > 2.0 * report.lipschitz_constant * dtau) report.lipschitz_ok = false;
  }
  report.monotone = report.max_violation <= floor;
  return report;
}

InverseReport verify_inverse(const Problem& problem, std::size_t n_probes) {
  return verify_inverse(problem, n_probes, TimeOptions::from(problem));
}

InverseReport verify_inverse(const Problem& problem, std::size_t n_probes, const TimeOptions& opts) {
  if (n_probes == 0) throw InvalidArgument("verify_inverse: need at least one probe");
  InverseReport report;
  report.eps_T = problem.eps_T();
  report.eps0 = solve_eps(0.0, problem, opts.dual).eps;
  if (report.eps_T - report.eps0 <= 1e-12 * std::max(report.eps_T, 1e-300)) {
    report.degenerate = true;
    return report;
  }

  const double horizon = problem.horizon();
  for (std::size_t j = 0; j < n_probes; ++j) {
    InverseProbe p;
    p.input = horizon * static_cast<double>(j) / static_cast<double>(n_probes);
    p.image = solve_eps(p.input, problem, opts.dual).eps;
    if (p.image <= 0.0) continue;  // inside the eps = 0 plateau tau(eps) is not defined
    p.round_trip = solve_tau(p.image, problem, opts).tau;
    p.residual = std::abs(p.round_trip - p.input);
    report.max_tau_residual = std::max(report.max_tau_residual, p.residual);
    report.tau_probes.push_back(p);
  }
  for (std::size_t j = 0; j < n_probes; ++j) {
    InverseProbe p;
    p.input = report.eps0 + (report.eps_T - report.eps0) * static_cast<double>(j) / static_cast<double>(n_probes);
    if (p.input <= 0.0) continue;
    const TimeSolution ts = solve_tau(p.input, problem, opts);
    p.image = ts.tau;
    p.round_trip = ts.eps_at_tau;
    p.residual = std::abs(p.round_trip - p.input);
    report.max_eps_residual = std::max(report.max_eps_residual, p.residual);
    report.eps_probes.push_back(p);
  }
  return report;
}

}  // namespace heatctl
