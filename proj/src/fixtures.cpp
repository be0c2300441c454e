#include "heatctl/fixtures.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "heatctl/bangbang.hpp"
#include "heatctl/oracle.hpp"
#include "heatctl/report.hpp"

namespace heatctl {

namespace {

constexpr const char* kAnalytic = "analytic: per-mode decay sqrt(sum_k c_k^2 exp(-2 lambda_k T)), lambda_k from the mode indices";
constexpr const char* kOracleEps = "oracle: projected gradient on the direct transcription";
constexpr const char* kOracleBangBang = "oracle: relative bang-bang residual of the transcription optimum";

double analytic_eps_T(const Problem& problem) {
  const auto& basis = problem.basis();
  const auto& lengths = problem.scenario().domain.lengths;
  const Vector& c = problem.initial_state().coeffs();
  double sum = 0.0;
  for (std::size_t k = 0; k < basis.size(); ++k) {
    double lambda = 0.0;
    for (std::size_t d = 0; d < lengths.size(); ++d) {
      const double w = basis.mode(k)[d] * std::numbers::pi / lengths[d];
      lambda += w * w;
    }
    const double ck = c[static_cast<Eigen::Index>(k)];
    sum += ck * ck * std::exp(-2.0 * lambda * problem.horizon());
  }
  return std::sqrt(sum);
}

double oracle_residual(double tau, const Problem& problem) {
  const OracleSolution o = oracle_eps(tau, problem);
  return bang_bang_check(o.control, tau, problem.bound(), false, 5e-2).residual_max;
}

// The second instrument for each kind.
double cross_check(const FixtureQuantity& q, const Problem& problem) {
  if (q.kind == "eps_T") return problem.eps_T();
  if (q.kind == "eps") return solve_eps(q.tau, problem).eps;
  if (q.kind == "bang_bang_residual") {
    return bang_bang_check(solve_eps(q.tau, problem), problem, 5e-2).residual_max;
  }
  throw InvalidArgument("unknown fixture quantity kind '" + q.kind + "'");
}

std::string generator_command(const std::string& name) {
  return "heatctl refresh-fixtures --scenario " + name + " --out fixtures";
}

}  // namespace

std::vector<double> fixture_curve_taus(double horizon) {
  std::vector<double> taus(17);
  for (std::size_t j = 0; j < taus.size(); ++j) taus[j] = horizon * static_cast<double>(j) / 17.0;
  return taus;
}

double rederive(const FixtureQuantity& q, const Problem& problem) {
  if (q.kind == "eps_T") return analytic_eps_T(problem);
  if (q.kind == "eps") return oracle_eps(q.tau, problem).eps;
  if (q.kind == "bang_bang_residual") return oracle_residual(q.tau, problem);
  throw InvalidArgument("unknown fixture quantity kind '" + q.kind + "'");
}

GoldenFixture generate_fixture(const Scenario& scenario) {
  const Problem problem(scenario);
  const double eps_T = problem.eps_T();
  GoldenFixture f;
  f.name = scenario.name;
  f.scenario = scenario;
  f.scenario_hash = scenario_hash(scenario);
  f.generator = generator_command(scenario.name);

  std::ostringstream diff;
  f.quantities.push_back({"eps_T", "eps_T", 0.0, analytic_eps_T(problem), 1e-12 * eps_T, kAnalytic});
  const auto taus = fixture_curve_taus(scenario.horizon);
  for (std::size_t j = 0; j < taus.size(); ++j) {
    const OracleSolution o = oracle_eps(taus[j], problem);
    if (!o.converged) diff << "  " << f.name << ": oracle did not converge at tau " << format_double(taus[j]) << "\n";
    const std::string name = j == 0 ? "eps_0" : "curve_" + std::to_string(j);
    f.quantities.push_back({name, "eps", taus[j], o.eps, 1e-3 * std::max(o.eps, 1e-3 * eps_T), kOracleEps});
  }
  if (!problem.bound().identically_zero()) {
    for (double tau : {0.0, 0.25, 0.5, 0.75}) {
      const double t = tau * scenario.horizon;
      f.quantities.push_back({"bang_bang_residual_" + format_double(tau), "bang_bang_residual", t, oracle_residual(t, problem),
                              5e-2, kOracleBangBang});
    }
  }

  for (const auto& q : f.quantities) {
    const double other = cross_check(q, problem);
    if (std::abs(other - q.value) > q.tolerance) {
      diff << "  " << f.name << " " << q.name << " (tau " << format_double(q.tau) << "): fixture " << format_double(q.value)
           << " vs check " << format_double(other) << ", |diff| " << format_double(std::abs(other - q.value))
           << " > tolerance " << format_double(q.tolerance) << "\n";
    }
  }
  if (!diff.str().empty()) throw FixtureMismatch(diff.str());
  return f;
}

std::string serialize_fixture(const GoldenFixture& f) {
  YAML::Emitter out;
  out.SetDoublePrecision(17);
  out << YAML::BeginMap;
  out << YAML::Key << "fixture" << YAML::Value << f.name;
  out << YAML::Key << "scenario_hash" << YAML::Value << f.scenario_hash;
  out << YAML::Key << "generator" << YAML::Value << f.generator;
  out << YAML::Key << "scenario" << YAML::Value << YAML::Load(serialize_scenario(f.scenario));
  out << YAML::Key << "quantities" << YAML::Value << YAML::BeginSeq;
  for (const auto& q : f.quantities) {
    out << YAML::BeginMap;
    out << YAML::Key << "name" << YAML::Value << q.name;
    out << YAML::Key << "kind" << YAML::Value << q.kind;
    out << YAML::Key << "tau" << YAML::Value << q.tau;
    out << YAML::Key << "value" << YAML::Value << q.value;
    out << YAML::Key << "tolerance" << YAML::Value << q.tolerance;
    out << YAML::Key << "provenance" << YAML::Value << q.provenance;
    out << YAML::EndMap;
  }
  out << YAML::EndSeq;
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

GoldenFixture parse_fixture(const std::string& text, const std::string& source) {
  GoldenFixture f;
  try {
    const YAML::Node root = YAML::Load(text);
    f.name = root["fixture"].as<std::string>();
    f.scenario_hash = root["scenario_hash"].as<std::string>();
    f.generator = root["generator"].as<std::string>();
    YAML::Emitter scenario;
    scenario << root["scenario"];
    f.scenario = parse_scenario(scenario.c_str(), source + "#scenario");
    for (const auto& q : root["quantities"]) {
      f.quantities.push_back({q["name"].as<std::string>(), q["kind"].as<std::string>(), q["tau"].as<double>(),
                              q["value"].as<double>(), q["tolerance"].as<double>(), q["provenance"].as<std::string>()});
    }
  } catch (const YAML::Exception& e) {
    throw ScenarioError(source, e.mark.line + 1, "<fixture>", e.msg);
  }
  return f;
}

GoldenFixture load_fixture(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError(path.string(), 0, "<file>", "cannot open fixture file");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_fixture(buf.str(), path.string());
}

std::vector<std::filesystem::path> refresh_fixtures(const std::vector<std::string>& scenarios,
                                                    const std::filesystem::path& out_dir) {
  std::vector<GoldenFixture> fixtures;
  std::string diff;
  for (const auto& name : scenarios) {
    try {
      fixtures.push_back(generate_fixture(resolve_scenario(name)));
    } catch (const FixtureMismatch& e) {
      diff += e.diff();
    }
  }
  if (!diff.empty()) throw FixtureMismatch(diff);

  std::vector<std::filesystem::path> written;
  for (const auto& f : fixtures) {
    const auto yaml = out_dir / (f.name + ".yaml");
    write_text(yaml, serialize_fixture(f));
    written.push_back(yaml);

    std::string csv = "tau,eps_oracle\n";
    for (const auto& q : f.quantities) {
      if (q.kind == "eps") csv += format_double(q.tau) + "," + format_double(q.value) + "\n";
    }
    const auto curve = out_dir / (f.name + "_curve.csv");
    write_text(curve, csv);
    written.push_back(curve);
  }
  return written;
}

}  // namespace heatctl
