#include "heatctl/target_solver.hpp"

#include <cmath>
#include <deque>
#include <limits>
#include <random>
#include <sstream>
#include <vector>

namespace heatctl {

namespace {

constexpr double kDirectionFloor = 1e-14;
constexpr double kArmijo = 1e-4;
constexpr double kEpsMach = std::numeric_limits<double>::epsilon();

std::string degenerate_message(std::size_t step, double norm) {
  std::ostringstream msg;
  msg << "degenerate certificate: ||G^{1/2} e^{Delta(T-t)} eta|| = " << norm << " at control step " << step;
  return msg.str();
}

Vector initial_direction(const Problem& problem, const DualOptions& opts) {
  const Vector& b = problem.free_terminal().coeffs();
  if (!opts.seed) return -b;
  std::mt19937_64 rng(*opts.seed);
  std::normal_distribution<double> normal;
  Vector v(b.size());
  for (Eigen::Index k = 0; k < v.size(); ++k) v[k] = normal(rng);
  return v.normalized() * std::max(b.norm(), 1e-300);
}

DualCertificate finish(const DualFunction& df, const Vector& eta, std::size_t iters, bool converged, bool interior) {
  DualCertificate cert;
  cert.iterations = iters;
  cert.converged = converged;
  cert.interior = interior;
  if (interior) {
    cert.eta = SpectralField::zero(static_cast<std::size_t>(eta.size()));
    cert.dual_value = 0.0;
  } else {
    cert.eta = SpectralField(eta.normalized());
    cert.dual_value = df.value(cert.eta.coeffs());
    if (cert.dual_value <= 0.0) {
      cert.interior = true;
      cert.eta = SpectralField::zero(static_cast<std::size_t>(eta.size()));
      cert.dual_value = 0.0;
    }
  }
  return cert;
}

Vector project_unit_ball(const Vector& v) {
  const double n = v.norm();
  return n > 1.0 ? Vector(v / n) : v;
}

// Armijo projected supergradient ascent on J over the unit ball, with
// Barzilai-Borwein trial steps.
DualCertificate ascent_dual(const DualFunction& df, Vector eta, const DualOptions& opts) {
  eta = eta.norm() > 0.0 ? Vector(eta.normalized()) : eta;
  double value = df.value(eta);
  Vector grad = df.gradient(eta);
  double step = 1.0;
  std::deque<double> recent{value};

  std::size_t it = 0;
  for (; it < opts.max_iters; ++it) {
    if ((project_unit_ball(eta + grad) - eta).norm() < 1e-8) return finish(df, eta, it, true, false);

    Vector next;
    double next_value = 0.0;
    double t = step;
    for (;;) {
      next = project_unit_ball(eta + t * grad);
      next_value = df.value(next);
      if (next_value >= value + kArmijo * grad.dot(next - eta) - 4.0 * kEpsMach * std::abs(value)) break;
      t *= 0.5;
      if (t < 1e-20) return finish(df, eta, it, false, false);
    }
    const Vector next_grad = df.gradient(next);
    const Vector s = next - eta;
    const double curvature = -s.dot(next_grad - grad);
    step = curvature > 0.0 ? std::clamp(s.squaredNorm() / curvature, 1e-6, 1e6) : 2.0 * t;

    eta = std::move(next);
    grad = next_grad;
    value = next_value;
    recent.push_back(value);
    if (recent.size() > 21) recent.pop_front();
    if (recent.size() == 21 && std::abs(recent.back() - recent.front()) <= 1e-10 * std::max(std::abs(value), 1e-300)) {
      return finish(df, eta, it + 1, true, false);
    }
  }
  return finish(df, eta, it, false, false);
}

}  // namespace

namespace {

ControlProfile sample_control(const Vector& eta, double tau, const Problem& problem) {
  ControlProfile u = ControlProfile::zero(problem.modes(), problem.horizon(), problem.steps());
  const Matrix& g = problem.gram().root();
  const Vector& lambdas = problem.basis().lambdas();
  for (std::size_t i = 0; i < u.steps(); ++i) {
    const double m = step_bound(problem.bound(), u, i, tau);
    if (m == 0.0) continue;
    const double mid = 0.5 * (std::max(u.step_start(i), tau) + u.step_end(i));
    const Vector decay = (-lambdas * (problem.horizon() - mid)).array().exp().matrix();
    const Vector v = g * decay.cwiseProduct(eta);
    const double n = v.norm();
    if (n < kDirectionFloor) throw DegenerateCertificate(i, n);
    u.values.col(static_cast<Eigen::Index>(i)) = (m / n) * v;
  }
  return u;
}

// Wolfe's minimum-norm-point algorithm on the reachable set R. Its linear
// minimization oracle is the generated terminal state,
//   argmin_{y in R} <y, x> = y(u),  u = -x/|x|,
// so every atom is reached by an admissible control and so is every convex
// combination. Stops once the combination is within tol of the origin or the
// lower bound J(u) closes the gap.
struct Steering {
  std::vector<Vector> directions;
  std::vector<double> weights;
  Vector terminal;
  double lower = 0.0;
  Vector best_direction;
  std::size_t iterations = 0;
};

Steering min_norm_point(const DualFunction& df, const Vector& start, double tol, std::size_t max_iters) {
  Steering st;
  std::vector<Vector> atoms{df.generated_terminal(start)};
  st.directions = {start};
  st.weights = {1.0};
  st.terminal = atoms[0];
  st.best_direction = start;
  for (; st.iterations < max_iters; ++st.iterations) {
    if (st.terminal.norm() <= tol) break;
    const Vector u = -st.terminal.normalized();
    const double lower = df.value(u);
    if (lower > st.lower) {
      st.lower = lower;
      st.best_direction = u;
    }
    if (st.terminal.norm() - st.lower <= tol) break;
    atoms.push_back(df.generated_terminal(u));
    st.directions.push_back(u);
    st.weights.push_back(0.0);

    // Minor cycle: move toward the affine minimizer until it lies in the simplex.
    for (std::size_t minor = 0; minor <= atoms.size(); ++minor) {
      const auto m = static_cast<Eigen::Index>(atoms.size());
      std::vector<double> affine(atoms.size(), 1.0);
      if (m > 1) {
        Matrix d(atoms[0].size(), m - 1);
        for (Eigen::Index i = 1; i < m; ++i) d.col(i - 1) = atoms[static_cast<std::size_t>(i)] - atoms[0];
        const Vector a = d.colPivHouseholderQr().solve(Vector(-atoms[0]));
        affine[0] = 1.0 - a.sum();
        for (Eigen::Index i = 1; i < m; ++i) affine[static_cast<std::size_t>(i)] = a[i - 1];
      }
      double theta = 1.0;
      for (std::size_t i = 0; i < atoms.size(); ++i) {
        if (affine[i] <= 0.0) theta = std::min(theta, st.weights[i] / (st.weights[i] - affine[i]));
      }
      for (std::size_t i = 0; i < atoms.size(); ++i) st.weights[i] += theta * (affine[i] - st.weights[i]);
      std::size_t kept = 0;
      for (std::size_t i = 0; i < atoms.size(); ++i) {
        if (st.weights[i] <= 0.0) continue;
        atoms[kept] = atoms[i];
        st.directions[kept] = st.directions[i];
        st.weights[kept] = st.weights[i];
        ++kept;
      }
      atoms.resize(kept);
      st.directions.resize(kept);
      st.weights.resize(kept);
      if (theta == 1.0) break;
    }
    double total = 0.0;
    for (double w : st.weights) total += w;
    st.terminal = Vector::Zero(atoms[0].size());
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      st.weights[i] /= total;
      st.terminal += st.weights[i] * atoms[i];
    }
  }
  return st;
}

DualCertificate interior_certificate(const Steering& st, std::size_t iters, double tol) {
  DualCertificate cert;
  cert.eta = SpectralField::zero(static_cast<std::size_t>(st.terminal.size()));
  cert.iterations = iters + st.iterations;
  cert.interior = true;
  cert.converged = st.terminal.norm() <= tol;
  for (const Vector& d : st.directions) cert.steering_directions.emplace_back(d);
  cert.steering_weights = st.weights;
  return cert;
}

double interior_tol(const Problem& problem, const DualOptions& opts) { return 1e2 * opts.tol * problem.eps_T(); }

// Maximizes Phi(eta) = J(eta) - |eta|^2 / 2. J is positively homogeneous, so
// the maximizer is eps * (unit maximizer of J), and eta -> 0 in the interior case.
DualCertificate newton_dual(const DualFunction& df, const Problem& problem, const DualOptions& opts) {
  const double scale = problem.eps_T();
  const auto k = static_cast<Eigen::Index>(problem.modes());
  auto phi = [&](const Vector& v) { return df.value(v) - 0.5 * v.squaredNorm(); };

  Vector eta = initial_direction(problem, opts);
  bool restarted = false;
  std::size_t it = 0;
  for (; it < opts.max_iters; ++it) {
    const Vector g = df.gradient(eta) - eta;
    if (g.norm() <= opts.tol * scale) return finish(df, eta, it, true, false);

    const Matrix h = Matrix::Identity(k, k) - df.hessian(eta);
    const Vector d = h.ldlt().solve(g);
    const double slope = g.dot(d);
    const double f0 = phi(eta);
    const double slack = 4.0 * kEpsMach * (std::abs(f0) + scale * scale);
    double t = 1.0;
    while (phi(eta + t * d) < f0 + kArmijo * t * slope - slack) {
      t *= 0.5;
      if (t < 1e-30) break;
    }
    if (t < 1e-30) return finish(df, eta, it, g.norm() <= 1e3 * opts.tol * scale, false);
    if ((eta + t * d).norm() <= 1e-13 * scale) {
      // While Phi < 0 a jump onto the origin always looks like progress, so a
      // collapse is only accepted once a control steering to the origin is found.
      // Otherwise resume Newton at the scale of the best lower bound.
      const double tol = interior_tol(problem, opts);
      const Steering st = min_norm_point(df, eta.normalized(), tol, opts.max_iters);
      if (st.terminal.norm() <= tol || st.lower <= 0.0 || restarted) {
        if (st.terminal.norm() <= tol || st.lower <= 0.0) return interior_certificate(st, it + 1, tol);
        return finish(df, st.best_direction, it + 1 + st.iterations, st.terminal.norm() - st.lower <= tol, false);
      }
      eta = st.lower * st.best_direction;
      restarted = true;
      continue;
    }
    eta += t * d;
  }
  return finish(df, eta, it, false, false);
}

}  // namespace

DegenerateCertificate::DegenerateCertificate(std::size_t step, double norm)
    : std::runtime_error(degenerate_message(step, norm)), step_(step) {}

DualFunction::DualFunction(const Problem& problem, double tau)
    : DualFunction(problem, tau, problem.scenario().quadrature) {}

DualFunction::DualFunction(const Problem& problem, double tau, const QuadratureOptions& quad)
    : problem_(&problem), tau_(tau) {
  if (!(tau >= 0.0) || !(tau < problem.horizon())) throw InvalidArgument("dual function: need 0 <= tau < T");
  const Vector& lambdas = problem.basis().lambdas();
  nodes_ = time_quadrature(problem.bound(), tau, lambdas.maxCoeff(), quad);
  decay_.resize(lambdas.size(), static_cast<Eigen::Index>(nodes_.size()));
  for (std::size_t j = 0; j < nodes_.size(); ++j) {
    decay_.col(static_cast<Eigen::Index>(j)) = (-lambdas * (problem.horizon() - nodes_[j].time)).array().exp().matrix();
  }
}

double DualFunction::integral_term(const Vector& eta) const {
  const Matrix& g = problem_->gram().root();
  double total = 0.0;
  for (std::size_t j = 0; j < nodes_.size(); ++j) {
    const auto& q = nodes_[j];
    if (q.bound == 0.0) continue;
    const Vector v = g * decay_.col(static_cast<Eigen::Index>(j)).cwiseProduct(eta);
    total += q.weight * q.bound * v.norm();
  }
  return total;
}

double DualFunction::support(const Vector& eta) const {
  return problem_->free_terminal().coeffs().dot(eta) + integral_term(eta);
}

Vector DualFunction::gradient(const Vector& eta) const {
  const Matrix& g = problem_->gram().root();
  Vector out = -problem_->free_terminal().coeffs();
  for (std::size_t j = 0; j < nodes_.size(); ++j) {
    const auto& q = nodes_[j];
    if (q.bound == 0.0) continue;
    const auto e = decay_.col(static_cast<Eigen::Index>(j));
    const Vector v = g * e.cwiseProduct(eta);
    const double n = v.norm();
    if (n <= 0.0) continue;
    out -= (q.weight * q.bound / n) * e.cwiseProduct(g * v);
  }
  return out;
}

Matrix DualFunction::hessian(const Vector& eta) const {
  const Matrix& g = problem_->gram().root();
  const Matrix& g2 = problem_->gram().matrix();
  const auto k = g.rows();
  Matrix out = Matrix::Zero(k, k);
  for (std::size_t j = 0; j < nodes_.size(); ++j) {
    const auto& q = nodes_[j];
    if (q.bound == 0.0) continue;
    const auto e = decay_.col(static_cast<Eigen::Index>(j));
    const Vector v = g * e.cwiseProduct(eta);
    const double n = v.norm();
    if (n <= 0.0) continue;
    const Vector z = g * (v / n);
    // -(w M / |v|) E (G - z z^T) E,  with B = G^{1/2}, v = B E eta, z = B v/|v|
    out.noalias() -= (q.weight * q.bound / n) * ((e * e.transpose()).cwiseProduct(g2 - z * z.transpose()));
  }
  return out;
}

double DualFunction::max_operator_norm() const {
  const Matrix& g2 = problem_->gram().matrix();
  double best = 0.0;
  for (Eigen::Index j = 0; j < decay_.cols(); ++j) {
    const auto e = decay_.col(j);
    // ||G^{1/2} E||^2 = largest eigenvalue of E G E
    const Matrix m = (e * e.transpose()).cwiseProduct(g2);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(m, Eigen::EigenvaluesOnly);
    best = std::max(best, std::sqrt(std::max(eig.eigenvalues().maxCoeff(), 0.0)));
  }
  return best;
}

double support_reachable(const SpectralField& eta, double tau, const Problem& problem) {
  if (eta.size() != problem.modes()) throw InvalidArgument("support_reachable: direction size mismatch");
  return DualFunction(problem, tau).support(eta.coeffs());
}

double dual_objective(const SpectralField& eta, double tau, const Problem& problem) {
  if (eta.size() != problem.modes()) throw InvalidArgument("dual_objective: direction size mismatch");
  if (eta.norm() > 1.0 + 1e-12) throw InvalidArgument("dual_objective: direction must lie in the unit ball");
  return DualFunction(problem, tau).value(eta.coeffs());
}

DualOptions DualOptions::from(const Problem& problem) {
  DualOptions o;
  o.tol = problem.tolerances().dual_tol;
  o.max_iters = problem.tolerances().dual_max_iters;
  return o;
}

DualCertificate solve_dual(double tau, const Problem& problem, const DualOptions& opts) {
  const DualFunction df(problem, tau);
  if (problem.eps_T() == 0.0) {
    // y0 = 0: the zero control already reaches the origin.
    return finish(df, Vector::Zero(static_cast<Eigen::Index>(problem.modes())), 0, true, true);
  }
  DualCertificate cert = opts.method == DualMethod::newton ? newton_dual(df, problem, opts)
                                                           : ascent_dual(df, initial_direction(problem, opts), opts);
  if (!cert.interior || !cert.steering_weights.empty()) return cert;
  const double tol = interior_tol(problem, opts);
  const Steering st = min_norm_point(df, -problem.free_terminal().coeffs().normalized(), tol, opts.max_iters);
  return interior_certificate(st, cert.iterations, tol);
}

TargetSolution solve_eps(double tau, const Problem& problem) { return solve_eps(tau, problem, DualOptions::from(problem)); }

TargetSolution solve_eps(double tau, const Problem& problem, const DualOptions& opts) {
  TargetSolution sol;
  sol.tau = tau;
  sol.certificate = solve_dual(tau, problem, opts);
  if (sol.certificate.interior) {
    // The convex combination of generated controls that steers to the origin.
    const DualFunction df(problem, tau);
    const auto& dirs = sol.certificate.steering_directions;
    const auto& weights = sol.certificate.steering_weights;
    sol.eps = 0.0;
    sol.control = ControlProfile::zero(problem.modes(), problem.horizon(), problem.steps());
    Vector reached = Vector::Zero(static_cast<Eigen::Index>(problem.modes()));
    if (dirs.empty()) reached = problem.free_terminal().coeffs();
    for (std::size_t i = 0; i < dirs.size(); ++i) {
      sol.control.values += weights[i] * sample_control(dirs[i].coeffs(), tau, problem).values;
      reached += weights[i] * df.generated_terminal(dirs[i].coeffs());
    }
    sol.terminal = solve_state(problem.initial_state(), sol.control, tau, problem.horizon(), problem.basis(), problem.gram());
    sol.primal_value = reached.norm();
    return sol;
  }
  sol.eps = std::max(0.0, sol.certificate.dual_value);
  // An unconverged certificate still yields its control, flagged through converged().
  sol.control = sol.certificate.converged ? reconstruct_control(sol.certificate, tau, problem)
                                          : sample_control(sol.certificate.eta.coeffs(), tau, problem);
  sol.terminal = solve_state(problem.initial_state(), sol.control, tau, problem.horizon(), problem.basis(), problem.gram());
  sol.primal_value = DualFunction(problem, tau).generated_terminal(sol.certificate.eta.coeffs()).norm();
  return sol;
}

ControlProfile reconstruct_control(const DualCertificate& certificate, double tau, const Problem& problem) {
  if (!certificate.converged) throw InvalidArgument("reconstruct_control: certificate did not converge");
  if (std::abs(certificate.eta.norm() - 1.0) > 1e-8) throw InvalidArgument("reconstruct_control: certificate must have unit norm");
  if (certificate.eta.size() != problem.modes()) throw InvalidArgument("reconstruct_control: certificate size mismatch");
  return sample_control(certificate.eta.coeffs(), tau, problem);
}

}  // namespace heatctl
