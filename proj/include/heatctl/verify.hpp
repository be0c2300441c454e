#pragma once

// Aggregated property checks for one scenario: dual/oracle agreement,
// bang-bang saturation, uniqueness of the optimum and the inverse identities.

#include <cstddef>
#include <string>
#include <vector>

#include "heatctl/report.hpp"

namespace heatctl {

struct OracleRow {
  double tau = 0.0;
  double eps_dual = 0.0;
  double eps_oracle = 0.0;
  double tolerance = 0.0;  // 1e-3 * max(eps_oracle, 1e-3 eps_T)
  std::size_t oracle_iterations = 0;
  bool converged = false;

  double gap() const { return std::abs(eps_dual - eps_oracle); }
  bool pass() const { return converged && gap() <= tolerance; }
};

// 0, T/4, T/2, 3T/4
std::vector<double> default_compare_taus(double horizon);
std::vector<OracleRow> compare_with_oracle(const std::vector<double>& taus, const Problem& problem);
std::string oracle_compare_csv(const std::vector<OracleRow>& rows);

enum class Status { pass, fail, skipped, error };
const char* status_name(Status s);

struct PropertyResult {
  std::string name;
  Status status = Status::pass;
  std::string detail;
  Json data;
};

struct VerifyOptions {
  std::size_t inverse_probes = 5;
  std::size_t uniqueness_runs = 3;
  double dual_bang_bang_threshold = 1e-3;
  double oracle_bang_bang_threshold = 5e-2;
  double uniqueness_tol = 1e-3;  // times T * sup M
  double oracle_gap_tol = 5e-2;  // times T * sup M
  double inverse_tol = 1e-3;     // times T and eps_T
};

struct VerifyReport {
  std::vector<PropertyResult> properties;
  // Optimal time control examined by the bang-bang and uniqueness checks.
  double tau = 0.0;
  double eps = 0.0;
  BangBangReport oracle_bang_bang;

  bool pass() const;
  Json to_json() const;
};

VerifyReport verify_scenario(const Problem& problem, const VerifyOptions& opts = {});

}  // namespace heatctl
