#pragma once

// Golden fixtures: reference values for preset scenarios, produced by the
// transcription oracle and cross-checked against the dual solver before
// anything is written.

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "heatctl/scenario.hpp"

namespace heatctl {

// kind: "eps_T" (analytic per-mode decay), "eps" (oracle eps(tau)),
// "bang_bang_residual" (oracle control residual_max at tau).
struct FixtureQuantity {
  std::string name;
  std::string kind;
  double tau = 0.0;
  double value = 0.0;
  double tolerance = 0.0;  // absolute
  std::string provenance;
};

struct GoldenFixture {
  std::string name;
  std::string scenario_hash;
  std::string generator;
  Scenario scenario;
  std::vector<FixtureQuantity> quantities;
};

class FixtureMismatch : public std::runtime_error {
public:
  explicit FixtureMismatch(const std::string& diff)
      : std::runtime_error("fixture refresh aborted:\n" + diff), diff_(diff) {}
  const std::string& diff() const { return diff_; }

private:
  std::string diff_;
};

// tau_j = j T / 17, j = 0..16
std::vector<double> fixture_curve_taus(double horizon);

// Oracle values first, dual solver second; throws FixtureMismatch listing every
// quantity whose two values differ by more than its tolerance.
GoldenFixture generate_fixture(const Scenario& scenario);

// Recomputes one quantity with the instrument named by its provenance.
double rederive(const FixtureQuantity& q, const Problem& problem);

std::string serialize_fixture(const GoldenFixture& f);
GoldenFixture parse_fixture(const std::string& text, const std::string& source = "<string>");
GoldenFixture load_fixture(const std::filesystem::path& path);

// Writes <out_dir>/<name>.yaml and <out_dir>/<name>_curve.csv per scenario.
// Nothing is written unless every scenario passes its cross-check; the
// FixtureMismatch then lists the differences of all scenarios.
std::vector<std::filesystem::path> refresh_fixtures(const std::vector<std::string>& scenarios,
                                                    const std::filesystem::path& out_dir);

}  // namespace heatctl
