#include "heatctl/oracle.hpp"

#include <algorithm>
#include <cmath>

namespace heatctl {

namespace {

void project_onto_balls(Matrix& u, const std::vector<double>& radii) {
  for (Eigen::Index i = 0; i < u.cols(); ++i) {
    const double r = radii[static_cast<std::size_t>(i)];
    const double n = u.col(i).norm();
    if (n > r) u.col(i) *= (r > 0.0 ? r / n : 0.0);
  }
}

}  // namespace

Matrix TranscriptionProblem::block(std::size_t i) const {
  return weights.col(static_cast<Eigen::Index>(i)).asDiagonal() * gram;
}

Vector TranscriptionProblem::terminal(const Matrix& controls) const {
  return offset + (weights.cwiseProduct(gram * controls)).rowwise().sum();
}

Matrix TranscriptionProblem::adjoint(const Vector& y) const {
  return gram * (weights.array().colwise() * y.array()).matrix();
}

double TranscriptionProblem::lipschitz() const {
  Matrix s = Matrix::Zero(gram.rows(), gram.cols());
  for (std::size_t i = 0; i < steps(); ++i) {
    const Matrix a = block(i);
    s.noalias() += a * a.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(s, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().maxCoeff();
}

TranscriptionProblem transcribe(double tau, const Problem& problem) {
  if (!(tau >= 0.0) || !(tau < problem.horizon())) throw InvalidArgument("transcribe: need 0 <= tau < T");
  TranscriptionProblem p;
  p.tau = tau;
  p.grid = problem.control_grid();
  p.offset = problem.free_terminal().coeffs();
  p.gram = problem.gram().root();
  const std::size_t n = problem.steps();
  p.weights = Matrix::Zero(static_cast<Eigen::Index>(problem.modes()), static_cast<Eigen::Index>(n));
  p.radii.assign(n, 0.0);
  const ControlProfile shape{p.grid, Matrix::Zero(1, static_cast<Eigen::Index>(n))};
  for (std::size_t i = 0; i < n; ++i) {
    const double s0 = std::max(p.grid[i], tau);
    const double s1 = p.grid[i + 1];
    if (s1 <= s0) continue;
    p.weights.col(static_cast<Eigen::Index>(i)) = decay_integral(problem.basis().lambdas(), s0, s1, problem.horizon());
    p.radii[i] = step_bound(problem.bound(), shape, i, tau);
  }
  return p;
}

OracleSolution solve_projected_gradient(const TranscriptionProblem& p, const OracleOptions& opts) {
  const auto k = static_cast<Eigen::Index>(p.modes());
  const auto n = static_cast<Eigen::Index>(p.steps());
  Matrix u = Matrix::Zero(k, n);
  OracleSolution sol;

  const double lip = p.lipschitz();
  Vector y = p.terminal(u);
  if (lip <= 0.0) {
    // No step can influence the terminal state.
    sol.converged = true;
  } else {
    const double step = 1.0 / lip;
    for (sol.iterations = 0; sol.iterations < opts.max_iters; ++sol.iterations) {
      const Matrix grad = p.adjoint(y);
      Matrix next = u - step * grad;
      project_onto_balls(next, p.radii);
      sol.gradient_mapping_norm = lip * (next - u).norm();
      u = std::move(next);
      y = p.terminal(u);
      if (opts.record_history) sol.objective_history.push_back(0.5 * y.squaredNorm());
      if (sol.gradient_mapping_norm <= opts.tol) {
        sol.converged = true;
        ++sol.iterations;
        break;
      }
    }
  }
  sol.terminal = y;
  sol.eps = y.norm();
  sol.control = ControlProfile{p.grid, std::move(u)};
  return sol;
}

OracleSolution oracle_eps(double tau, const Problem& problem) {
  const auto& tol = problem.tolerances();
  return solve_projected_gradient(transcribe(tau, problem), {tol.oracle_tol, tol.oracle_max_iters, false});
}

}  // namespace heatctl
