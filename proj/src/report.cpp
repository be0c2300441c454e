#include "heatctl/report.hpp"

#include <cstdio>
#include <ctime>
#include <fstream>
#include <stdexcept>

namespace heatctl {

namespace {

std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::vector<double> step_norms(const ControlProfile& u) {
  std::vector<double> out(u.steps());
  for (std::size_t i = 0; i < u.steps(); ++i) out[i] = u.step_norm(i);
  return out;
}

Json to_json(const DualCertificate& c) {
  return {{"eta", to_std(c.eta.coeffs())},
          {"dual_value", c.dual_value},
          {"iterations", c.iterations},
          {"converged", c.converged},
          {"interior", c.interior}};
}

Json to_json(const TargetSolution& s) {
  return {{"tau", s.tau},
          {"eps", s.eps},
          {"dual_value", s.certificate.dual_value},
          {"terminal_norm", s.terminal.norm()},
          {"primal_value", s.primal_value},
          {"converged", s.converged()},
          {"certificate", to_json(s.certificate)},
          {"control_grid", s.control.grid},
          {"control_norms", step_norms(s.control)}};
}

Json to_json(const TimeSolution& s) {
  return {{"tau", s.tau},
          {"eps_target", s.eps_target},
          {"eps_at_tau", s.eps_at_tau},
          {"residual", std::abs(s.eps_at_tau - s.eps_target)},
          {"saturated", s.saturated},
          {"converged", s.converged},
          {"bracket",
           {{"lo", s.bracket_lo}, {"hi", s.bracket_hi}, {"eps_lo", s.eps_lo}, {"eps_hi", s.eps_hi}, {"width", s.bracket_width}}},
          {"evaluations", s.evaluations},
          {"monotonicity_violations", s.monotonicity_violations},
          {"target", to_json(s.target)}};
}

Json to_json(const CurveReport& r) {
  Json points = Json::array();
  for (const auto& p : r.points) points.push_back({{"tau", p.tau}, {"eps", p.eps}, {"converged", p.converged}});
  return {{"eps_T", r.eps_T},
          {"degenerate", r.degenerate},
          {"all_converged", r.all_converged},
          {"monotone", r.monotone},
          {"max_violation", r.max_violation},
          {"strict_increases", r.strict_increases},
          {"differences", r.points.empty() ? 0 : r.points.size() - 1},
          {"lipschitz_ok", r.lipschitz_ok},
          {"lipschitz_constant", r.lipschitz_constant},
          {"max_slope", r.max_slope},
          {"points", points}};
}

Json to_json(const InverseReport& r) {
  auto probes = [](const std::vector<InverseProbe>& ps) {
    Json out = Json::array();
    for (const auto& p : ps) {
      out.push_back({{"input", p.input}, {"image", p.image}, {"round_trip", p.round_trip}, {"residual", p.residual}});
    }
    return out;
  };
  return {{"degenerate", r.degenerate},
          {"eps0", r.eps0},
          {"eps_T", r.eps_T},
          {"max_tau_residual", r.max_tau_residual},
          {"max_eps_residual", r.max_eps_residual},
          {"tau_probes", probes(r.tau_probes)},
          {"eps_probes", probes(r.eps_probes)}};
}

Json to_json(const BangBangReport& r) {
  Json j = {{"skipped", r.skipped},
            {"threshold", r.threshold},
            {"residual_max", r.residual_max},
            {"residual_median", r.residual_median},
            {"steps_checked", r.steps.size()},
            {"pass", r.pass()}};
  if (r.skipped) j["skip_reason"] = r.skip_reason;
  return j;
}

Json to_json(const UniquenessReport& r) {
  return {{"runs", r.runs.size()}, {"dual_gap", r.dual_gap}, {"oracle_gap", r.oracle_gap}, {"max_gap", r.max_gap}};
}

Json to_json(const OracleSolution& s) {
  return {{"eps", s.eps},
          {"iterations", s.iterations},
          {"converged", s.converged},
          {"gradient_mapping_norm", s.gradient_mapping_norm},
          {"control_norms", step_norms(s.control)}};
}

std::string curve_csv(const CurveReport& r) {
  std::string out = "tau,eps,converged\n";
  for (const auto& p : r.points) {
    out += format_double(p.tau) + "," + format_double(p.eps) + "," + (p.converged ? "1" : "0") + "\n";
  }
  return out;
}

std::string bang_bang_csv(const BangBangReport& r) {
  std::string out = "step,t,norm,bound,residual\n";
  for (const auto& s : r.steps) {
    out += std::to_string(s.step) + "," + format_double(s.time) + "," + format_double(s.norm) + "," +
           format_double(s.bound) + "," + format_double(s.residual) + "\n";
  }
  return out;
}

std::string iso_timestamp(std::chrono::system_clock::time_point t) {
  const std::time_t secs = std::chrono::system_clock::to_time_t(t);
  std::tm tm{};
  gmtime_r(&secs, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

Json to_json(const RunManifest& m) {
  return {{"scenario", m.scenario_name},
          {"scenario_hash", m.scenario_hash},
          {"version", m.version},
          {"command", m.command},
          {"started", iso_timestamp(m.started)},
          {"finished", iso_timestamp(m.finished)},
          {"outputs", m.outputs}};
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

void write_json(const std::filesystem::path& path, const Json& j) { write_text(path, j.dump(2) + "\n"); }

}  // namespace heatctl
