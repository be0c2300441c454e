#pragma once

// Small seeded generators for property tests.

#include <cmath>
#include <cstdint>
#include <random>
#include <string>

#include "heatctl/scenario.hpp"

namespace gen {

class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform(double lo = 0.0, double hi = 1.0) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
  double normal() { return std::normal_distribution<double>()(engine_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine_); }
  std::uint64_t bits() { return engine_(); }

  heatctl::Vector vector(std::size_t n) {
    heatctl::Vector v(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = normal();
    return v;
  }
  heatctl::Vector unit_vector(std::size_t n) { return vector(n).normalized(); }
  // Uniform in the closed unit ball.
  heatctl::Vector in_unit_ball(std::size_t n) {
    return unit_vector(n) * std::pow(uniform(), 1.0 / static_cast<double>(n));
  }

  std::mt19937_64& engine() { return engine_; }

private:
  std::mt19937_64 engine_;
};

// Control with ||u_i|| = fill_i * M_i per step, fill_i uniform in [0, 1].
inline heatctl::ControlProfile admissible_control(Rng& rng, const heatctl::Problem& p, double tau = 0.0,
                                                  bool saturate = false) {
  heatctl::ControlProfile u = heatctl::ControlProfile::zero(p.modes(), p.horizon(), p.steps());
  for (std::size_t i = 0; i < u.steps(); ++i) {
    const double m = heatctl::step_bound(p.bound(), u, i, tau);
    const double fill = saturate ? 1.0 : rng.uniform();
    u.values.col(static_cast<Eigen::Index>(i)) = rng.unit_vector(p.modes()) * (m * fill);
  }
  return u;
}

// Random interval scenario: domain length, region, horizon, modes, steps,
// initial state and a piecewise bound are all drawn.
inline heatctl::Scenario random_scenario(Rng& rng) {
  heatctl::Scenario s;
  s.name = "random-" + std::to_string(rng.integer(0, 1 << 20));
  const double length = rng.uniform(1.0, 4.0);
  s.domain = heatctl::DomainSpec::interval(length);
  const double a = rng.uniform(0.0, 0.6) * length;
  s.region = heatctl::ControlRegion::interval(a, a + rng.uniform(0.1, 0.4) * length);
  s.horizon = rng.uniform(0.3, 2.0);
  s.modes = static_cast<std::size_t>(rng.integer(1, 12));
  std::vector<double> c(static_cast<std::size_t>(rng.integer(1, static_cast<int>(s.modes))));
  for (double& x : c) x = rng.uniform(-1.0, 1.0);
  s.initial = heatctl::InitialCoefficients{c};
  const int pieces = rng.integer(1, 5);
  // steps refine the bound pieces, so a step never straddles a jump of M
  s.steps = static_cast<std::size_t>(pieces * rng.integer(2, 8));
  std::vector<double> bps{0.0}, vals;
  for (int i = 1; i <= pieces; ++i) bps.push_back(s.horizon * i / pieces);
  for (int i = 0; i < pieces; ++i) vals.push_back(rng.uniform(0.2, 2.0));
  s.bound = heatctl::BoundPieces{bps, vals};
  s.seed = rng.bits();
  return s;
}

}  // namespace gen
