#include <doctest.h>

#include <cmath>

#include "heatctl/admissible.hpp"
#include "heatctl/oracle.hpp"
#include "heatctl/target_solver.hpp"
#include "support/generators.hpp"

using namespace heatctl;

namespace {

Scenario one_mode_source(double m) {
  Scenario s = preset("standard");
  s.initial = InitialPreset{"first-mode"};
  s.bound = BoundGenerator{"constant", m, 0.0, 1.0, 1};
  return s;
}

Scenario zero_bound() { return preset("zero-bound"); }

// Linear functional u -> <y(T; u), eta> - <e^{Delta T} y0, eta>, assembled
// column by column from solve_state on unit impulses.
Matrix impulse_response(const Problem& p, const Vector& eta, double tau) {
  Matrix c = Matrix::Zero(static_cast<Eigen::Index>(p.modes()), static_cast<Eigen::Index>(p.steps()));
  const SpectralField zero = SpectralField::zero(p.modes());
  for (std::size_t i = 0; i < p.steps(); ++i) {
    for (std::size_t j = 0; j < p.modes(); ++j) {
      ControlProfile e = ControlProfile::zero(p.modes(), p.horizon(), p.steps());
      e.values(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = 1.0;
      c(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) =
          solve_state(zero, e, tau, p.horizon(), p.basis(), p.gram()).coeffs().dot(eta);
    }
  }
  return c;
}

struct SearchResult {
  double best = -1e300;
  double max_sample = -1e300;
  ControlProfile control;
};

// (1+1) evolution strategy over saturated admissible controls, mutating one
// step at a time with a per-step 1/5-rule step size. Every evaluated control is
// admissible, so every value is a lower bound for the support function.
SearchResult random_search(const Problem& p, const Vector& eta, double tau, std::size_t evaluations, std::uint64_t seed) {
  gen::Rng rng(seed);
  const Matrix c = impulse_response(p, eta, tau);
  const double offset = p.free_terminal().coeffs().dot(eta);
  ControlProfile u = gen::admissible_control(rng, p, tau, true);
  std::vector<double> radius(p.steps()), sigma(p.steps(), 0.5);
  for (std::size_t i = 0; i < p.steps(); ++i) radius[i] = step_bound(p.bound(), u, i, tau);
  auto step_value = [&](std::size_t i, const Vector& w) { return c.col(static_cast<Eigen::Index>(i)).dot(w); };

  double value = offset;
  for (std::size_t i = 0; i < p.steps(); ++i) value += step_value(i, u.values.col(static_cast<Eigen::Index>(i)));
  SearchResult r;
  r.best = r.max_sample = value;
  for (std::size_t k = 1; k < evaluations; ++k) {
    const auto i = static_cast<std::size_t>(rng.integer(0, static_cast<int>(p.steps()) - 1));
    const auto col = static_cast<Eigen::Index>(i);
    if (radius[i] == 0.0) continue;
    const Vector old = u.values.col(col);
    Vector trial = old / radius[i] + sigma[i] * rng.vector(p.modes());
    trial = trial.normalized() * radius[i];
    const double next = value - step_value(i, old) + step_value(i, trial);
    r.max_sample = std::max(r.max_sample, next);
    if (next > value) {
      u.values.col(col) = trial;
      value = next;
      sigma[i] *= 1.5;
    } else {
      sigma[i] *= std::pow(1.5, -0.25);
    }
  }
  r.best = value;
  r.control = u;
  return r;
}

}  // namespace

TEST_SUITE("target-solver") {

TEST_CASE("support function dominates and nearly matches a random-search lower bound") {
  // a generic direction, so the optimal control turns within every step
  const Problem p(preset("standard"));
  gen::Rng rng(98);
  const Vector eta = rng.unit_vector(p.modes());
  const double h = support_reachable(SpectralField(eta), 0.0, p);
  const SearchResult r = random_search(p, eta, 0.0, 100000, 99);
  // the best control, re-evaluated directly
  const double direct = solve_state(p.initial_state(), r.control, 0.0, p.horizon(), p.basis(), p.gram()).coeffs().dot(eta);
  CHECK(direct == doctest::Approx(r.best).epsilon(1e-12));
  CHECK(membership_residual(r.control, p.bound()) <= 1e-15);
  CHECK(r.max_sample <= h + 1e-12);
  CHECK(h - r.max_sample <= 1e-2);
}

TEST_CASE("support function: trivial cases") {
  gen::Rng rng(12);
  const Problem zero(zero_bound());
  for (int t = 0; t < 20; ++t) {
    const Vector eta = rng.vector(zero.modes());
    CHECK(support_reachable(SpectralField(eta), rng.uniform(0, 0.9), zero) ==
          doctest::Approx(zero.free_terminal().coeffs().dot(eta)).epsilon(1e-15));
  }
  const Problem p(preset("standard"));
  CHECK(support_reachable(SpectralField::zero(p.modes()), 0.2, p) == 0.0);
  CHECK(dual_objective(SpectralField::zero(p.modes()), 0.2, p) == 0.0);
}

TEST_CASE("dual_objective rejects directions outside the unit ball") {
  const Problem p(preset("standard"));
  Vector eta = Vector::Zero(static_cast<Eigen::Index>(p.modes()));
  eta[0] = 1.0 + 1e-9;
  CHECK_THROWS_AS(dual_objective(SpectralField(eta), 0.0, p), InvalidArgument);
}

TEST_CASE("zero bound: the uncontrolled distance is attained") {
  const Problem p(zero_bound());
  const Vector b = p.free_terminal().coeffs();
  CHECK(dual_objective(SpectralField(-b / b.norm()), 0.0, p) == doctest::Approx(p.eps_T()).epsilon(1e-15));
  for (double tau : {0.0, 0.5}) {
    const TargetSolution s = solve_eps(tau, p);
    CHECK(s.converged());
    CHECK(s.eps == doctest::Approx(p.eps_T()).epsilon(1e-12));
    CHECK(s.control.values.norm() == 0.0);
  }
}

TEST_CASE("full control region, one-mode initial state: closed form") {
  // With omega = whole domain only mode 1 needs steering:
  //   eps(0) = max(0, e^{-1} - M (1 - e^{-1})).
  Scenario s = one_mode_source(0.3);
  s.region = ControlRegion::whole(s.domain);
  const Problem p(s);
  const double expected = std::exp(-1.0) - 0.3 * (1.0 - std::exp(-1.0));
  const TargetSolution sol = solve_eps(0.0, p);
  CHECK(sol.converged());
  CHECK(sol.eps == doctest::Approx(expected).epsilon(1e-10));
  CHECK(oracle_eps(0.0, p).eps == doctest::Approx(expected).epsilon(1e-8));

  for (double m : {0.6, 1.0, 3.0}) {
    Scenario big = one_mode_source(m);
    big.region = ControlRegion::whole(big.domain);
    const Problem q(big);
    REQUIRE(m >= std::exp(-1.0) / (1.0 - std::exp(-1.0)));
    const TargetSolution z = solve_eps(0.0, q);
    CHECK(z.converged());
    CHECK(z.certificate.interior);
    CHECK(z.eps == 0.0);
    CHECK(z.primal_value <= 1e-10 * q.eps_T());
    CHECK(z.terminal.norm() <= 1e-3 * q.eps_T());
    CHECK(membership_residual(z.control, q.bound()) <= 1e-15);
  }
}

TEST_CASE("standard scenario: dual value agrees with the transcription oracle") {
  const Problem p(preset("standard"));
  for (double tau : {0.0, 0.25, 0.5, 0.75}) {
    const TargetSolution s = solve_eps(tau, p);
    const OracleSolution o = oracle_eps(tau, p);
    REQUIRE(s.converged());
    REQUIRE(o.converged);
    CHECK(dual_objective(s.certificate.eta, tau, p) == doctest::Approx(s.certificate.dual_value).epsilon(1e-14));
    CHECK(std::abs(s.eps - o.eps) <= 1e-3 * std::max(o.eps, 1e-3 * p.eps_T()));
    // reconstructed control: saturated, zero before tau, and it reaches eps
    CHECK(std::abs(s.terminal.norm() - s.eps) <= 1e-3 * s.eps);
    CHECK(std::abs(s.terminal.norm() - o.eps) <= 1e-3 * o.eps);
    for (std::size_t i = 0; i < s.control.steps(); ++i) {
      const double m = step_bound(p.bound(), s.control, i, tau);
      if (s.control.step_end(i) <= tau) {
        CHECK(s.control.step_norm(i) == 0.0);
      } else {
        CHECK(std::abs(s.control.step_norm(i) - m) <= 1e-15 * m);
      }
    }
  }
}

TEST_CASE("Newton and projected ascent reach the same certificate") {
  const Problem p(preset("rectangle"));
  DualOptions newton = DualOptions::from(p);
  DualOptions ascent = newton;
  ascent.method = DualMethod::projected_ascent;
  for (double tau : {0.0, 0.6}) {
    const DualCertificate a = solve_dual(tau, p, newton);
    const DualCertificate b = solve_dual(tau, p, ascent);
    REQUIRE(a.converged);
    REQUIRE(b.converged);
    CHECK(a.dual_value == doctest::Approx(b.dual_value).epsilon(1e-8));
    CHECK((a.eta.coeffs() - b.eta.coeffs()).norm() < 1e-3);
  }
}

TEST_CASE("gradient and Hessian agree with finite differences") {
  const Problem p(preset("standard"));
  const DualFunction f(p, 0.3);
  gen::Rng rng(21);
  for (int t = 0; t < 5; ++t) {
    const Vector eta = rng.unit_vector(p.modes()) * 0.7;
    const Vector g = f.gradient(eta);
    const Matrix h = f.hessian(eta);
    const double step = 1e-6;
    for (Eigen::Index k = 0; k < eta.size(); ++k) {
      Vector e = Vector::Zero(eta.size());
      e[k] = step;
      CHECK(std::abs((f.value(eta + e) - f.value(eta - e)) / (2 * step) - g[k]) < 1e-7);
      const Vector dg = (f.gradient(eta + e) - f.gradient(eta - e)) / (2 * step);
      CHECK((dg - h.col(k)).cwiseAbs().maxCoeff() < 1e-5);
    }
  }
}

TEST_CASE("property: weak duality against random feasible controls") {
  gen::Rng rng(31);
  for (const char* name : {"standard", "constant-bound", "rectangle"}) {
    const Problem p(preset(name));
    for (int t = 0; t < 30; ++t) {
      const double tau = rng.uniform(0.0, 0.9);
      const DualFunction f(p, tau);
      const ControlProfile u = gen::admissible_control(rng, p, tau);
      const double primal = solve_state(p.initial_state(), u, tau, p.horizon(), p.basis(), p.gram()).norm();
      for (int k = 0; k < 10; ++k) CHECK(f.value(rng.in_unit_ball(p.modes())) <= primal + 1e-12);
    }
  }
}

TEST_CASE("property: weak duality on random scenarios") {
  gen::Rng rng(32);
  for (int t = 0; t < 25; ++t) {
    const Problem p(gen::random_scenario(rng));
    const double tau = rng.uniform(0.0, 0.9) * p.horizon();
    const DualFunction f(p, tau);
    const OracleSolution o = oracle_eps(tau, p);
    const ControlProfile u = gen::admissible_control(rng, p, tau);
    const double primal = solve_state(p.initial_state(), u, tau, p.horizon(), p.basis(), p.gram()).norm();
    for (int k = 0; k < 10; ++k) {
      const double j = f.value(rng.in_unit_ball(p.modes()));
      CHECK(j <= primal + 1e-12);
      CHECK(j <= o.eps + 1e-12);
    }
  }
}

TEST_CASE("property: separation, the optimal terminal point maximizes <y, eta*> over the reachable set") {
  const Problem p(preset("standard"));
  gen::Rng rng(41);
  for (double tau : {0.0, 0.5}) {
    const TargetSolution s = solve_eps(tau, p);
    REQUIRE(s.converged());
    const Vector& eta = s.certificate.eta.coeffs();
    const Vector y_star = DualFunction(p, tau).generated_terminal(eta);
    // the separating direction points from the ball toward the reachable set
    CHECK((y_star + s.eps * eta).norm() <= 1e-9 * s.eps);
    const double top = y_star.dot(eta);
    double best = -1e300;
    for (int k = 0; k < 2000; ++k) {
      const ControlProfile u = gen::admissible_control(rng, p, tau, k % 2 == 0);
      best = std::max(best, solve_state(p.initial_state(), u, tau, p.horizon(), p.basis(), p.gram()).coeffs().dot(eta));
    }
    best = std::max(best, random_search(p, eta, tau, 20000, 5).best);
    best = std::max(best, solve_state(p.initial_state(), s.control, tau, p.horizon(), p.basis(), p.gram()).coeffs().dot(eta));
    CHECK(top >= best - 1e-6 * y_star.norm());
  }
}

TEST_CASE("property: the integral term is positively homogeneous") {
  gen::Rng rng(51);
  const Problem p(preset("rectangle"));
  for (int t = 0; t < 100; ++t) {
    const DualFunction f(p, rng.uniform(0.0, 0.9));
    const Vector eta = rng.vector(p.modes());
    const double c = rng.uniform(0.01, 100.0);
    CHECK(f.integral_term(c * eta) == doctest::Approx(c * f.integral_term(eta)).epsilon(1e-13));
  }
}

TEST_CASE("independent random starts reach the same terminal state") {
  const Problem p(preset("standard"));
  for (double tau : {0.0, 0.4}) {
    DualOptions a = DualOptions::from(p), b = a;
    a.seed = 1;
    b.seed = 2;
    const TargetSolution sa = solve_eps(tau, p, a), sb = solve_eps(tau, p, b);
    REQUIRE(sa.converged());
    REQUIRE(sb.converged());
    CHECK((sa.terminal.coeffs() - sb.terminal.coeffs()).norm() <= 1e-4 * p.eps_T());
  }
}

TEST_CASE("interior case: eps = 0 comes with a steering control on random scenarios") {
  gen::Rng rng(71);
  std::size_t interior = 0;
  for (int t = 0; t < 8; ++t) {
    const Problem p(gen::random_scenario(rng));
    for (int j = 0; j < 9; j += 2) {
      const double tau = p.horizon() * j / 9.0;
      const TargetSolution s = solve_eps(tau, p);
      REQUIRE(s.converged());
      if (!s.certificate.interior) continue;
      ++interior;
      double total = 0.0;
      for (double w : s.certificate.steering_weights) {
        CHECK(w > 0.0);
        total += w;
      }
      CHECK(total == doctest::Approx(1.0).epsilon(1e-14));
      CHECK(s.primal_value <= 1e-10 * p.eps_T());
      CHECK(membership_residual(s.control, p.bound()) <= 1e-15);
      // the same verdict from the other dual method
      DualOptions a = DualOptions::from(p);
      a.method = DualMethod::projected_ascent;
      CHECK(solve_dual(tau, p, a).interior);
    }
  }
  CHECK(interior >= 5);
}

TEST_CASE("a Newton jump onto the origin is not mistaken for reachability") {
  // This draw makes the first Newton step from -b land on the origin although
  // eps(T/9) > 0.
  gen::Rng rng(71);
  Scenario sc;
  for (int t = 0; t < 3; ++t) sc = gen::random_scenario(rng);
  const Problem p(sc);
  const double tau = p.horizon() / 9.0;
  DualOptions a = DualOptions::from(p);
  a.method = DualMethod::projected_ascent;
  const DualCertificate ref = solve_dual(tau, p, a);
  REQUIRE_FALSE(ref.interior);
  const TargetSolution s = solve_eps(tau, p);
  CHECK(s.converged());
  CHECK_FALSE(s.certificate.interior);
  CHECK(s.eps == doctest::Approx(ref.dual_value).epsilon(1e-6));
  CHECK(s.eps >= solve_eps(0.0, p).eps);
}

TEST_CASE("non-convergence is flagged, not hidden") {
  const Problem p(preset("standard"));
  DualOptions o = DualOptions::from(p);
  o.max_iters = 1;
  const TargetSolution s = solve_eps(0.0, p, o);
  CHECK_FALSE(s.converged());
  CHECK_THROWS_AS(reconstruct_control(s.certificate, 0.0, p), InvalidArgument);
}

TEST_CASE("a certificate invisible from the control region is reported, not regularized") {
  Scenario s = preset("standard");
  s.region = ControlRegion::interval(0.0, 1e-20);
  const Problem p(s);
  DualCertificate c;
  c.eta = SpectralField::unit(p.modes(), 0);
  c.converged = true;
  try {
    reconstruct_control(c, 0.0, p);
    FAIL("expected a degenerate certificate");
  } catch (const DegenerateCertificate& e) {
    CHECK(e.step() == 0);
  }
}

}
