#include "heatctl/cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "heatctl/fixtures.hpp"
#include "heatctl/verify.hpp"

namespace heatctl {

namespace {

namespace fs = std::filesystem;

struct Settings {
  std::string scenario;
  std::vector<std::string> fixture_scenarios{"standard", "zero-bound"};
  std::string out = "out";
  std::string grid;
  std::optional<double> eps;
  std::optional<std::uint64_t> seed;
  bool refine = false;
};

// start:stop:count, endpoints included.
std::vector<double> parse_grid(const std::string& spec) {
  std::vector<std::string> parts;
  std::size_t pos = 0;
  for (std::size_t next; (next = spec.find(':', pos)) != std::string::npos; pos = next + 1) {
    parts.push_back(spec.substr(pos, next - pos));
  }
  parts.push_back(spec.substr(pos));
  if (parts.size() != 3) throw InvalidArgument("--grid expects start:stop:count, got '" + spec + "'");
  double start = 0.0, stop = 0.0;
  long count = 0;
  try {
    std::size_t used = 0;
    start = std::stod(parts[0], &used);
    if (used != parts[0].size()) throw std::invalid_argument(parts[0]);
    stop = std::stod(parts[1], &used);
    if (used != parts[1].size()) throw std::invalid_argument(parts[1]);
    count = std::stol(parts[2], &used);
    if (used != parts[2].size()) throw std::invalid_argument(parts[2]);
  } catch (const std::logic_error&) {
    throw InvalidArgument("--grid: cannot parse '" + spec + "'");
  }
  if (count < 1) throw InvalidArgument("--grid: count must be >= 1");
  if (count == 1) return {start};
  std::vector<double> grid(static_cast<std::size_t>(count));
  for (long j = 0; j < count; ++j) grid[static_cast<std::size_t>(j)] = start + (stop - start) * static_cast<double>(j) / static_cast<double>(count - 1);
  return grid;
}

std::string join_command(int argc, const char* const* argv) {
  std::string cmd;
  for (int i = 0; i < argc; ++i) {
    if (i > 0) cmd += ' ';
    cmd += i == 0 ? fs::path(argv[0]).filename().string() : argv[i];
  }
  return cmd;
}

Scenario load(const Settings& s) {
  Scenario sc = resolve_scenario(s.scenario);
  if (s.seed) sc.seed = *s.seed;
  if (s.refine) sc = sc.refined();
  return sc;
}

class Run {
public:
  Run(const Scenario& sc, std::string command, fs::path out_dir) : out_dir_(std::move(out_dir)) {
    manifest_.scenario_name = sc.name;
    manifest_.scenario_hash = scenario_hash(sc);
    manifest_.command = std::move(command);
    manifest_.started = std::chrono::system_clock::now();
    fs::create_directories(out_dir_);
  }

  void text(const std::string& file, const std::string& body) {
    write_text(out_dir_ / file, body);
    manifest_.outputs.push_back(file);
  }
  void json(const std::string& file, const Json& body) { text(file, body.dump(2) + "\n"); }

  void finish() {
    manifest_.finished = std::chrono::system_clock::now();
    manifest_.outputs.push_back("manifest.json");
    write_json(out_dir_ / "manifest.json", to_json(manifest_));
  }

private:
  fs::path out_dir_;
  RunManifest manifest_;
};

int cmd_eps_curve(const Settings& s, const std::string& command, std::ostream& out) {
  const Problem problem(load(s));
  const double horizon = problem.horizon();
  const std::vector<double> grid = s.grid.empty() ? fixture_curve_taus(horizon) : parse_grid(s.grid);
  Run run(problem.scenario(), command, s.out);
  const CurveReport curve = eps_curve(grid, problem, DualOptions::from(problem));
  run.text("curve.csv", curve_csv(curve));
  run.json("curve_report.json", to_json(curve));
  run.finish();
  out << "eps_T = " << format_double(curve.eps_T) << "\n";
  out << grid.size() << " points, monotone " << (curve.monotone ? "yes" : "no") << ", strict increases "
      << curve.strict_increases << "/" << (grid.empty() ? 0 : grid.size() - 1) << ", lipschitz "
      << (curve.lipschitz_ok ? "ok" : "violated") << (curve.degenerate ? ", degenerate (M = 0)" : "") << "\n";
  std::size_t failed = 0;
  for (const auto& p : curve.points) failed += p.converged ? 0 : 1;
  if (failed > 0) out << failed << " of " << grid.size() << " points did not converge\n";
  return curve.all_converged ? exit_ok : exit_not_converged;
}

int cmd_tau(const Settings& s, const std::string& command, std::ostream& out) {
  if (!s.eps) throw InvalidArgument("tau: --eps is required");
  const Problem problem(load(s));
  const TimeSolution ts = solve_tau(*s.eps, problem);
  Run run(problem.scenario(), command, s.out);
  run.json("tau.json", to_json(ts));
  run.finish();
  out << "tau = " << format_double(ts.tau) << " (eps(tau) = " << format_double(ts.eps_at_tau) << ", bracket width "
      << format_double(ts.bracket_width) << (ts.saturated ? ", saturated" : "") << ")\n";
  return ts.converged ? exit_ok : exit_not_converged;
}

int cmd_verify(const Settings& s, const std::string& command, std::ostream& out) {
  const Problem problem(load(s));
  const VerifyReport report = verify_scenario(problem);
  Run run(problem.scenario(), command, s.out);
  run.json("verify.json", report.to_json());
  run.text("bangbang.csv", bang_bang_csv(report.oracle_bang_bang));
  run.finish();
  for (const auto& p : report.properties) {
    out << p.name << ": " << status_name(p.status) << (p.detail.empty() ? "" : " (" + p.detail + ")") << "\n";
  }
  out << "verdict: " << (report.pass() ? "pass" : "fail") << "\n";
  return report.pass() ? exit_ok : exit_property_failed;
}

int cmd_oracle_compare(const Settings& s, const std::string& command, std::ostream& out) {
  const Problem problem(load(s));
  const std::vector<double> taus = s.grid.empty() ? default_compare_taus(problem.horizon()) : parse_grid(s.grid);
  for (double tau : taus) {
    if (!(tau >= 0.0) || !(tau < problem.horizon())) throw InvalidArgument("oracle-compare: grid must lie in [0, T)");
  }
  const auto rows = compare_with_oracle(taus, problem);
  Run run(problem.scenario(), command, s.out);
  run.text("oracle_compare.csv", oracle_compare_csv(rows));
  Json arr = Json::array();
  bool converged = true, agree = true;
  for (const auto& r : rows) {
    converged = converged && r.converged;
    agree = agree && r.pass();
    arr.push_back({{"tau", r.tau}, {"eps_dual", r.eps_dual}, {"eps_oracle", r.eps_oracle}, {"gap", r.gap()},
                   {"tolerance", r.tolerance}, {"oracle_iterations", r.oracle_iterations}, {"pass", r.pass()}});
  }
  run.json("oracle_compare.json", {{"rows", arr}, {"pass", agree}});
  run.finish();
  for (const auto& r : rows) {
    out << "tau " << format_double(r.tau) << ": dual " << format_double(r.eps_dual) << ", oracle "
        << format_double(r.eps_oracle) << ", gap " << format_double(r.gap()) << (r.pass() ? "" : "  FAIL") << "\n";
  }
  if (!converged) return exit_not_converged;
  return agree ? exit_ok : exit_property_failed;
}

int cmd_refresh(const Settings& s, std::ostream& out) {
  for (const auto& path : refresh_fixtures(s.fixture_scenarios, s.out)) out << "wrote " << path.string() << "\n";
  return exit_ok;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Optimal time / optimal target control of the internally controlled heat equation", "heatctl"};
  app.set_version_flag("--version", std::string(HEATCTL_VERSION));
  app.require_subcommand(1);
  Settings s;

  auto common = [&](CLI::App* sub, bool needs_grid) {
    sub->add_option("--scenario", s.scenario, "Scenario file or preset name")->required();
    sub->add_option("--out", s.out, "Output directory")->capture_default_str();
    if (needs_grid) sub->add_option("--grid", s.grid, "tau grid start:stop:count");
    sub->add_option("--seed", s.seed, "Override the scenario seed");
    sub->add_flag("--refine", s.refine, "Double modes, control steps and quadrature orders");
  };
  auto* curve = app.add_subcommand("eps-curve", "eps(tau) on a tau grid");
  common(curve, true);
  auto* tau = app.add_subcommand("tau", "Optimal time tau(eps)");
  common(tau, false);
  tau->add_option("--eps", s.eps, "Target radius")->required();
  auto* verify = app.add_subcommand("verify", "Bang-bang, uniqueness, inverse and oracle checks");
  common(verify, false);
  auto* compare = app.add_subcommand("oracle-compare", "Dual solver against the transcription oracle");
  common(compare, true);
  auto* refresh = app.add_subcommand("refresh-fixtures", "Regenerate golden fixtures");
  refresh->add_option("--scenario", s.fixture_scenarios, "Preset names or scenario files")->capture_default_str();
  refresh->add_option("--out", s.out, "Fixture directory")->default_str("fixtures");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? exit_ok : exit_input_error;
  }
  if (refresh->parsed() && refresh->count("--out") == 0) s.out = "fixtures";

  const std::string command = join_command(argc, argv);
  try {
    if (curve->parsed()) return cmd_eps_curve(s, command, out);
    if (tau->parsed()) return cmd_tau(s, command, out);
    if (verify->parsed()) return cmd_verify(s, command, out);
    if (compare->parsed()) return cmd_oracle_compare(s, command, out);
    return cmd_refresh(s, out);
  } catch (const ScenarioError& e) {
    err << "error: " << e.what() << "\n";
    return exit_input_error;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << "\n";
    return exit_input_error;
  } catch (const InfeasibleTarget& e) {
    err << "error: " << e.what() << "\n";
    return exit_infeasible;
  } catch (const FixtureMismatch& e) {
    err << e.what();
    return exit_property_failed;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_not_converged;
  }
}

}  // namespace heatctl
