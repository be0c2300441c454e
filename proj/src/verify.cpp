#include "heatctl/verify.hpp"

#include <cmath>
#include <exception>
#include <functional>
#include <optional>

namespace heatctl {

namespace {

PropertyResult guarded(const std::string& name, const std::function<void(PropertyResult&)>& body) {
  PropertyResult r;
  r.name = name;
  r.data = Json::object();
  try {
    body(r);
  } catch (const std::exception& e) {
    r.status = Status::error;
    r.detail = e.what();
  }
  return r;
}

}  // namespace

std::vector<double> default_compare_taus(double horizon) {
  return {0.0, 0.25 * horizon, 0.5 * horizon, 0.75 * horizon};
}

std::vector<OracleRow> compare_with_oracle(const std::vector<double>& taus, const Problem& problem) {
  std::vector<OracleRow> rows;
  for (double tau : taus) {
    const TargetSolution dual = solve_eps(tau, problem);
    const OracleSolution oracle = oracle_eps(tau, problem);
    OracleRow row;
    row.tau = tau;
    row.eps_dual = dual.eps;
    row.eps_oracle = oracle.eps;
    row.tolerance = 1e-3 * std::max(oracle.eps, 1e-3 * problem.eps_T());
    row.oracle_iterations = oracle.iterations;
    row.converged = dual.converged() && oracle.converged;
    rows.push_back(row);
  }
  return rows;
}

std::string oracle_compare_csv(const std::vector<OracleRow>& rows) {
  std::string out = "tau,eps_dual,eps_oracle,gap,tolerance,pass\n";
  for (const auto& r : rows) {
    out += format_double(r.tau) + "," + format_double(r.eps_dual) + "," + format_double(r.eps_oracle) + "," +
           format_double(r.gap()) + "," + format_double(r.tolerance) + "," + (r.pass() ? "1" : "0") + "\n";
  }
  return out;
}

const char* status_name(Status s) {
  switch (s) {
    case Status::pass: return "pass";
    case Status::fail: return "fail";
    case Status::skipped: return "skipped";
    case Status::error: return "error";
  }
  return "?";
}

bool VerifyReport::pass() const {
  for (const auto& p : properties) {
    if (p.status == Status::fail || p.status == Status::error) return false;
  }
  return true;
}

Json VerifyReport::to_json() const {
  Json props = Json::object();
  for (const auto& p : properties) {
    Json j = {{"status", status_name(p.status)}};
    if (!p.detail.empty()) j["detail"] = p.detail;
    if (!p.data.empty()) j["data"] = p.data;
    props[p.name] = j;
  }
  return {{"verdict", pass() ? "pass" : "fail"}, {"tau", tau}, {"eps", eps}, {"properties", props}};
}

VerifyReport verify_scenario(const Problem& problem, const VerifyOptions& opts) {
  VerifyReport report;
  const double horizon = problem.horizon();
  const double eps_T = problem.eps_T();
  const double control_scale = horizon * problem.bound().sup();

  report.properties.push_back(guarded("oracle_agreement", [&](PropertyResult& r) {
    const auto rows = compare_with_oracle(default_compare_taus(horizon), problem);
    bool ok = true;
    Json arr = Json::array();
    for (const auto& row : rows) {
      ok = ok && row.pass();
      arr.push_back({{"tau", row.tau}, {"eps_dual", row.eps_dual}, {"eps_oracle", row.eps_oracle}, {"gap", row.gap()},
                     {"tolerance", row.tolerance}, {"converged", row.converged}});
    }
    r.data["rows"] = arr;
    r.status = ok ? Status::pass : Status::fail;
  }));

  // The optimal time control at the midpoint target eps = (eps(0) + eps_T) / 2.
  const TargetSolution at_zero = solve_eps(0.0, problem);
  std::optional<TimeSolution> time;
  if (eps_T - at_zero.eps > 1e-12 * eps_T) {
    try {
      time = solve_tau(0.5 * (at_zero.eps + eps_T), problem);
    } catch (const std::exception&) {
      // reported below through the bang-bang property
    }
  }
  const TargetSolution& target = time ? time->target : at_zero;
  report.tau = target.tau;
  report.eps = target.eps;

  report.properties.push_back(guarded("bang_bang", [&](PropertyResult& r) {
    if (problem.bound().identically_zero()) {
      r.status = Status::skipped;
      r.detail = "degenerate bound M = 0";
      return;
    }
    if (!time && eps_T - at_zero.eps > 1e-12 * eps_T) throw std::runtime_error("optimal time solve failed");
    const BangBangReport dual = bang_bang_check(target, problem, opts.dual_bang_bang_threshold);
    const OracleSolution oracle = oracle_eps(target.tau, problem);
    report.oracle_bang_bang =
        bang_bang_check(oracle.control, target.tau, problem.bound(), target.certificate.interior, opts.oracle_bang_bang_threshold);
    r.data["dual"] = heatctl::to_json(dual);
    r.data["oracle"] = heatctl::to_json(report.oracle_bang_bang);
    if (dual.skipped) {
      r.status = Status::skipped;
      r.detail = dual.skip_reason;
      return;
    }
    r.status = dual.pass() && report.oracle_bang_bang.pass() && oracle.converged ? Status::pass : Status::fail;
  }));

  report.properties.push_back(guarded("uniqueness", [&](PropertyResult& r) {
    if (target.certificate.interior) {
      r.status = Status::skipped;
      r.detail = "eps(tau) = 0";
      return;
    }
    const UniquenessReport u = uniqueness_check(target.tau, problem, opts.uniqueness_runs);
    r.data = heatctl::to_json(u);
    r.data["dual_tolerance"] = opts.uniqueness_tol * control_scale;
    r.data["oracle_tolerance"] = opts.oracle_gap_tol * control_scale;
    const bool ok = u.dual_gap <= opts.uniqueness_tol * control_scale && u.oracle_gap <= opts.oracle_gap_tol * control_scale;
    r.status = ok ? Status::pass : Status::fail;
  }));

  report.properties.push_back(guarded("inverse", [&](PropertyResult& r) {
    const InverseReport inv = verify_inverse(problem, opts.inverse_probes);
    r.data = heatctl::to_json(inv);
    if (inv.degenerate) {
      r.status = Status::skipped;
      r.detail = "eps(tau) is constant: inverse identities are vacuous";
      return;
    }
    const bool ok = inv.max_tau_residual <= opts.inverse_tol * horizon && inv.max_eps_residual <= opts.inverse_tol * eps_T;
    r.status = ok ? Status::pass : Status::fail;
  }));

  return report;
}

}  // namespace heatctl
