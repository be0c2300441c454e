#include "heatctl/quadrature.hpp"

#include <cmath>
#include <numbers>

namespace heatctl {

GaussRule gauss_legendre(std::size_t order) {
  if (order == 0) throw InvalidArgument("gauss_legendre: order must be >= 1");
  const auto n = static_cast<unsigned>(order);
  GaussRule rule{std::vector<double>(order), std::vector<double>(order)};
  for (unsigned i = 0; i < n; ++i) {
    // Chebyshev-type initial guess, then Newton on P_n.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      const double p = std::legendre(n, x);
      const double p_prev = n > 0 ? std::legendre(n - 1, x) : 0.0;
      dp = n * (x * p - p_prev) / (x * x - 1.0);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    {
      const double p = std::legendre(n, x);
      const double p_prev = std::legendre(n - 1, x);
      dp = n * (x * p - p_prev) / (x * x - 1.0);
    }
    rule.nodes[order - 1 - i] = x;
    rule.weights[order - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

std::vector<QuadratureNode> time_quadrature(const BoundProfile& bound, double tau, double stiffest_rate,
                                            const QuadratureOptions& opts) {
  const GaussRule body = gauss_legendre(opts.order);
  const GaussRule tail = gauss_legendre(opts.tail_order);
  const double horizon = bound.horizon();
  const auto& bps = bound.breakpoints();

  std::vector<QuadratureNode> out;
  auto add_panel = [&](double lo, double hi, double m, const GaussRule& rule) {
    const double half = 0.5 * (hi - lo);
    const double mid = 0.5 * (hi + lo);
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
      out.push_back({mid + half * rule.nodes[q], half * rule.weights[q], m});
    }
  };

  const std::size_t last = bound.pieces() - 1;
  for (std::size_t p = 0; p <= last; ++p) {
    const double lo = std::max(bps[p], tau);
    const double hi = bps[p + 1];
    if (hi <= lo) continue;
    const double m = bound.values()[p];
    if (p < last) {
      add_panel(lo, hi, m, body);
      continue;
    }
    std::vector<double> cuts{lo};
    double width = hi - lo;
    while (stiffest_rate * width > 1.0) {
      width *= 0.5;
      cuts.push_back(horizon - width);
    }
    cuts.push_back(hi);
    for (std::size_t c = 0; c + 1 < cuts.size(); ++c) add_panel(cuts[c], cuts[c + 1], m, tail);
  }
  return out;
}

}  // namespace heatctl
