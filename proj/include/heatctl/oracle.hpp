#pragma once

// Brute-force reference solver for the optimal target value: the control is
// transcribed onto the piecewise-constant time grid and
//   min 1/2 || b + sum_i A_i u_i ||^2   s.t.  ||u_i|| <= M_i
// is solved by projected gradient with exact ball projections.

#include <cstddef>
#include <vector>

#include "heatctl/scenario.hpp"

namespace heatctl {

struct TranscriptionProblem {
  double tau = 0.0;
  std::vector<double> grid;
  Vector offset;                 // b = e^{Delta T} y0
  Matrix weights;                // column i: per-mode decay integral over step i clipped at tau
  Matrix gram;                   // G^{1/2}; A_i = diag(weights.col(i)) * gram
  std::vector<double> radii;     // M_i; 0 for steps before tau

  std::size_t steps() const { return radii.size(); }
  std::size_t modes() const { return static_cast<std::size_t>(offset.size()); }
  Matrix block(std::size_t i) const;
  Vector terminal(const Matrix& controls) const;  // b + sum_i A_i u_i
  Matrix adjoint(const Vector& y) const;          // column i: A_i^T y
  // Largest eigenvalue of sum_i A_i A_i^T, the gradient Lipschitz constant.
  double lipschitz() const;
};

TranscriptionProblem transcribe(double tau, const Problem& problem);

struct OracleOptions {
  double tol = 1e-10;          // gradient-mapping norm
  std::size_t max_iters = 100000;
  bool record_history = false;
};

struct OracleSolution {
  double eps = 0.0;
  ControlProfile control;
  Vector terminal;
  std::size_t iterations = 0;
  bool converged = false;
  double gradient_mapping_norm = 0.0;
  std::vector<double> objective_history;  // filled when record_history is set
};

OracleSolution solve_projected_gradient(const TranscriptionProblem& p, const OracleOptions& opts = {});

// transcribe + solve with the scenario's oracle tolerances.
OracleSolution oracle_eps(double tau, const Problem& problem);

}  // namespace heatctl
