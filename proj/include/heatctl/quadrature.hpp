#pragma once

#include <cstddef>
#include <vector>

#include "heatctl/admissible.hpp"

namespace heatctl {

struct GaussRule {
  std::vector<double> nodes;    // on [-1, 1], ascending
  std::vector<double> weights;
};

GaussRule gauss_legendre(std::size_t order);

struct QuadratureOptions {
  std::size_t order = 8;        // nodes per bound piece
  std::size_t tail_order = 16;  // nodes per panel in the piece ending at T

  QuadratureOptions refined() const { return {2 * order, 2 * tail_order}; }
  friend bool operator==(const QuadratureOptions&, const QuadratureOptions&) = default;
};

struct QuadratureNode {
  double time;
  double weight;
  double bound;  // M(time)
};

// Composite rule on (tau, T): one Gauss panel per bound piece, clipped at tau.
// The last piece is graded geometrically toward T until
// stiffest_rate * panel_length <= 1, since exp(-lambda (T - s)) is sharpest there.
std::vector<QuadratureNode> time_quadrature(const BoundProfile& bound, double tau, double stiffest_rate,
                                            const QuadratureOptions& opts);

}  // namespace heatctl
