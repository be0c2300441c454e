#pragma once

// Optimal target value
//   eps(tau) = min { ||y(T; chi_(tau,T) u, y0)|| : ||u(t)|| <= M(t) }
// computed through the support function of the reachable set
//   h(eta) = <e^{Delta T} y0, eta> + int_tau^T M(s) ||G^{1/2} e^{Delta (T-s)} eta|| ds
// and the concave dual  J(eta) = -h(eta),  eps(tau) = max(0, sup_{||eta||<=1} J).
//
// Sign convention: the certificate stores the maximizer eta* of J. At the
// optimum eta* = -y*/||y*||, y* maximizes <y, eta*> over the reachable set,
// and the optimal control is u*(s) = M(s) B e^{Delta(T-s)} eta* / ||B e^{Delta(T-s)} eta*||,  B = G^{1/2}.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "heatctl/quadrature.hpp"
#include "heatctl/scenario.hpp"

namespace heatctl {

class DegenerateCertificate : public std::runtime_error {
public:
  DegenerateCertificate(std::size_t step, double norm);
  std::size_t step() const { return step_; }

private:
  std::size_t step_;
};

// Quadrature-discretized dual objective on (tau, T).
class DualFunction {
public:
  DualFunction(const Problem& problem, double tau);
  DualFunction(const Problem& problem, double tau, const QuadratureOptions& quad);

  double tau() const { return tau_; }
  const std::vector<QuadratureNode>& nodes() const { return nodes_; }

  // int_tau^T M(s) ||G^{1/2} e^{Delta(T-s)} eta|| ds
  double integral_term(const Vector& eta) const;
  double support(const Vector& eta) const;
  double value(const Vector& eta) const { return -support(eta); }
  Vector gradient(const Vector& eta) const;
  Matrix hessian(const Vector& eta) const;
  // Terminal state driven by the continuous-time control generated by eta;
  // equals -gradient(eta).
  Vector generated_terminal(const Vector& eta) const { return -gradient(eta); }
  // max over nodes of the operator norm of G^{1/2} e^{Delta(T-s)}.
  double max_operator_norm() const;

private:
  const Problem* problem_;
  double tau_;
  std::vector<QuadratureNode> nodes_;
  Matrix decay_;  // column j: exp(-lambda (T - s_j))
};

double support_reachable(const SpectralField& eta, double tau, const Problem& problem);
double dual_objective(const SpectralField& eta, double tau, const Problem& problem);

enum class DualMethod {
  newton,            // damped Newton on J(eta) - |eta|^2/2
  projected_ascent,  // Armijo projected supergradient ascent on the unit ball
};

struct DualOptions {
  DualMethod method = DualMethod::newton;
  double tol = 1e-12;
  std::size_t max_iters = 5000;
  std::optional<std::uint64_t> seed;  // random initial direction when set

  static DualOptions from(const Problem& problem);
};

struct DualCertificate {
  SpectralField eta;  // unit-norm maximizer of J (zero in the interior case)
  double dual_value = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  bool interior = false;  // J <= 0 on the unit ball: the origin is reachable
  // Interior case: the controls generated by these unit directions, combined
  // with these convex weights, steer y(T) to the origin.
  std::vector<SpectralField> steering_directions;
  std::vector<double> steering_weights;
};

struct TargetSolution {
  double tau = 0.0;
  double eps = 0.0;
  DualCertificate certificate;
  ControlProfile control;
  SpectralField terminal;     // y(T) under the piecewise-constant control
  // ||y(T)|| under the continuous-time control generated by eta*, or by the
  // steering combination in the interior case.
  double primal_value = 0.0;

  bool converged() const { return certificate.converged; }
};

DualCertificate solve_dual(double tau, const Problem& problem, const DualOptions& opts);

TargetSolution solve_eps(double tau, const Problem& problem);
TargetSolution solve_eps(double tau, const Problem& problem, const DualOptions& opts);

// Samples the certificate's control at the midpoints of the control grid
// (each step clipped to (tau, T)); steps before tau are zero.
ControlProfile reconstruct_control(const DualCertificate& certificate, double tau, const Problem& problem);

}  // namespace heatctl
