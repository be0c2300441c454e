#include <doctest.h>

#include <cfloat>
#include <cmath>
#include <cstdint>
#include <vector>

#include "heatctl/bangbang.hpp"
#include "heatctl/oracle.hpp"
#include "support/generators.hpp"

using namespace heatctl;

namespace {

Scenario with_steps(const char* name, std::size_t steps) {
  Scenario s = preset(name);
  s.steps = steps;
  return s;
}

double mid_target(const Problem& p) { return 0.5 * (solve_eps(0.0, p).eps + p.eps_T()); }

}  // namespace

TEST_SUITE("bangbang") {

TEST_CASE("residual examples") {
  const BoundProfile m = BoundProfile::constant(1.0, 2.0);
  ControlProfile u = ControlProfile::zero(2, 1.0, 4);
  for (std::size_t i = 0; i < 4; ++i) u.values(0, static_cast<Eigen::Index>(i)) = 2.0;
  u.values(1, 3) = 0.0;
  u.values(0, 3) = 1.0;  // half the bound on the last step
  const BangBangReport r = bang_bang_check(u, 0.0, m);
  REQUIRE(r.steps.size() == 4);
  CHECK(r.residual_max == doctest::Approx(0.5));
  CHECK(r.residual_median == 0.0);
  CHECK_FALSE(r.pass());
  CHECK(r.steps[3].time == doctest::Approx(0.875));

  // steps that start before tau are the pad and are not examined
  const BangBangReport late = bang_bang_check(u, 0.6, m);
  CHECK(late.steps.size() == 1);
  CHECK(late.steps[0].step == 3);
}

TEST_CASE("skipped for zero bounds and interior solutions") {
  const ControlProfile u = ControlProfile::zero(2, 1.0, 4);
  const BangBangReport zero = bang_bang_check(u, 0.0, BoundProfile::constant(1.0, 0.0));
  CHECK(zero.skipped);
  CHECK(zero.pass());
  const BangBangReport interior = bang_bang_check(u, 0.0, BoundProfile::constant(1.0, 1.0), true);
  CHECK(interior.skipped);
  CHECK_FALSE(interior.skip_reason.empty());
}

TEST_CASE("the dual control saturates the bound to rounding") {
  for (const char* name : {"standard", "constant-bound", "rectangle"}) {
    const Problem p(preset(name));
    const TimeSolution ts = solve_tau(mid_target(p), p);
    const BangBangReport r = bang_bang_check(ts, p);
    CHECK_FALSE(r.skipped);
    CHECK(r.residual_max <= 4.0 * DBL_EPSILON);
  }
}

TEST_CASE("the oracle control saturates the bound and does not get worse with finer steps") {
  for (const char* name : {"standard", "constant-bound"}) {
    double previous = 0.0;
    for (std::size_t steps : {64u, 128u}) {
      const Problem p(with_steps(name, steps));
      const TimeSolution ts = solve_tau(mid_target(p), p);
      const OracleSolution o = oracle_eps(ts.tau, p);
      REQUIRE(o.converged);
      const BangBangReport r = bang_bang_check(o.control, ts.tau, p.bound(), false, 5e-2);
      CHECK(r.pass());
      if (steps == 128u) CHECK(r.residual_max <= 1.1 * previous + 4.0 * DBL_EPSILON);
      previous = r.residual_max;
    }
  }
}

TEST_CASE("control_distance") {
  ControlProfile a = ControlProfile::zero(2, 2.0, 4);
  ControlProfile b = a;
  CHECK(control_distance(a, b) == 0.0);
  b.values(0, 1) = 3.0;  // one step of length 0.5
  CHECK(control_distance(a, b) == doctest::Approx(std::sqrt(0.5 * 9.0)));
  CHECK(control_distance(b, a) == control_distance(a, b));
  const ControlProfile c = ControlProfile::zero(2, 2.0, 5);
  CHECK_THROWS_AS(control_distance(a, c), InvalidArgument);
}

TEST_CASE("uniqueness: identical seeds coincide, different seeds agree") {
  const Problem p(preset("standard"));
  const double tau = solve_tau(mid_target(p), p).tau;
  const std::vector<std::uint64_t> same{7, 7};
  CHECK(uniqueness_check(tau, p, same, false).dual_gap == 0.0);

  const UniquenessReport r = uniqueness_check(tau, p, 3);
  REQUIRE(r.runs.size() == 3);
  const double scale = p.horizon() * p.bound().sup();
  CHECK(r.dual_gap <= 1e-3 * scale);
  CHECK(r.oracle_gap <= 5e-2 * scale);
  CHECK(r.max_gap == std::max(r.dual_gap, r.oracle_gap));
  const std::vector<std::uint64_t> one{1};
  CHECK_THROWS_AS(uniqueness_check(tau, p, one), InvalidArgument);
}

TEST_CASE("the dual-oracle gap shrinks as the control grid is refined") {
  for (const char* name : {"standard", "rectangle"}) {
    double previous = 0.0;
    for (std::size_t steps : {32u, 64u, 128u}) {
      const Problem p(with_steps(name, steps));
      const double tau = solve_tau(mid_target(p), p).tau;
      const double gap = uniqueness_check(tau, p, 2).oracle_gap;
      if (steps > 32u) CHECK(gap < previous);
      previous = gap;
    }
  }
}

TEST_CASE("the dual control stays saturated when the mode count doubles") {
  double previous = 0.0;
  for (std::size_t modes : {8u, 16u, 32u}) {
    Scenario s = preset("standard");
    s.modes = modes;
    const Problem p(s);
    const BangBangReport r = bang_bang_check(solve_eps(0.4, p), p);
    CHECK(r.residual_max <= std::max(1.1 * previous, 4.0 * DBL_EPSILON));
    previous = r.residual_max;
  }
}

TEST_CASE("property: reconstructed controls saturate on random scenarios") {
  gen::Rng rng(81);
  for (int t = 0; t < 15; ++t) {
    const Problem p(gen::random_scenario(rng));
    const double tau = rng.uniform(0.0, 0.9) * p.horizon();
    const TargetSolution s = solve_eps(tau, p);
    REQUIRE(s.converged());
    const BangBangReport r = bang_bang_check(s, p);
    if (s.certificate.interior) {
      CHECK(r.skipped);
    } else {
      CHECK(r.residual_max <= 4.0 * DBL_EPSILON);
    }
  }
}

}
