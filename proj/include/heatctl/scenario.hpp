#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "heatctl/admissible.hpp"
#include "heatctl/quadrature.hpp"
#include "heatctl/spectral.hpp"

namespace heatctl {

struct Tolerances {
  double tau_tol = 1e-4;  // bisection bracket width, as a fraction of T
  double dual_tol = 1e-12;
  std::size_t dual_max_iters = 5000;
  double oracle_tol = 1e-10;
  std::size_t oracle_max_iters = 100000;

  Tolerances tightened(double factor) const;
  friend bool operator==(const Tolerances&, const Tolerances&) = default;
};

struct InitialCoefficients {
  std::vector<double> values;  // missing trailing modes are zero
  friend bool operator==(const InitialCoefficients&, const InitialCoefficients&) = default;
};
struct InitialPreset {
  std::string name;  // "first-mode" | "two-mode"
  friend bool operator==(const InitialPreset&, const InitialPreset&) = default;
};
using InitialSpec = std::variant<InitialCoefficients, InitialPreset>;

struct BoundPieces {
  std::vector<double> breakpoints;
  std::vector<double> values;
  friend bool operator==(const BoundPieces&, const BoundPieces&) = default;
};
// M(t) = base + amplitude * sin(2 pi frequency t / T), sampled at the
// midpoints of `pieces` equal pieces. kind "constant" ignores amplitude,
// kind "zero" is the degenerate no-control profile.
struct BoundGenerator {
  std::string kind = "sine";
  double base = 1.0;
  double amplitude = 0.0;
  double frequency = 1.0;
  std::size_t pieces = 1;
  friend bool operator==(const BoundGenerator&, const BoundGenerator&) = default;
};
using BoundSpec = std::variant<BoundPieces, BoundGenerator>;

struct Scenario {
  std::string name = "custom";
  DomainSpec domain = DomainSpec::interval(1.0);
  ControlRegion region = ControlRegion::interval(0.0, 1.0);
  double horizon = 1.0;
  std::size_t modes = 16;
  std::size_t steps = 64;
  InitialSpec initial = InitialCoefficients{{1.0}};
  BoundSpec bound = BoundGenerator{};
  Tolerances tolerances;
  QuadratureOptions quadrature;
  std::uint64_t seed = 42;

  // Doubles modes, control steps and quadrature orders.
  Scenario refined() const;
  void validate() const;

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

class ScenarioError : public std::runtime_error {
public:
  ScenarioError(const std::string& source, int line, const std::string& field, const std::string& what);
  int line() const { return line_; }
  const std::string& field() const { return field_; }

private:
  int line_;
  std::string field_;
};

std::vector<std::string> preset_names();
Scenario preset(std::string_view name);

Scenario parse_scenario(const std::string& text, const std::string& source = "<string>");
Scenario load_scenario(const std::filesystem::path& path);
// Accepts a preset name or a path to a scenario file.
Scenario resolve_scenario(const std::string& name_or_path);
std::string serialize_scenario(const Scenario& s);
void save_scenario(const Scenario& s, const std::filesystem::path& path);
std::string scenario_hash(const Scenario& s);

BoundProfile make_bound(const Scenario& s);
SpectralField make_initial_state(const Scenario& s);

// Everything derived from a scenario that the solvers share. Immutable.
class Problem {
public:
  explicit Problem(Scenario scenario);

  const Scenario& scenario() const { return scenario_; }
  const EigenBasis& basis() const { return basis_; }
  const GramMatrix& gram() const { return gram_; }
  const BoundProfile& bound() const { return bound_; }
  const SpectralField& initial_state() const { return y0_; }
  // e^{Delta T} y0, the uncontrolled terminal state.
  const SpectralField& free_terminal() const { return free_terminal_; }
  double eps_T() const { return free_terminal_.norm(); }
  double horizon() const { return scenario_.horizon; }
  std::size_t modes() const { return basis_.size(); }
  std::size_t steps() const { return scenario_.steps; }
  const std::vector<double>& control_grid() const { return grid_; }
  const Tolerances& tolerances() const { return scenario_.tolerances; }

private:
  Scenario scenario_;
  EigenBasis basis_;
  GramMatrix gram_;
  BoundProfile bound_;
  SpectralField y0_;
  SpectralField free_terminal_;
  std::vector<double> grid_;
};

}  // namespace heatctl
