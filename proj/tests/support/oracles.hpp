#pragma once

// Independent reference computations used by the tests. None of these call
// into the spectral machinery they are checking: eigenvalues come from
// finite-difference Laplacians, states from a Crank-Nicolson time stepper on
// a fine grid.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace oracle {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Smallest `count` eigenvalues of -d^2/dx^2 on (0, L), Dirichlet, n interior points.
inline std::vector<double> fd_eigenvalues_1d(double length, int n, int count) {
  const double h = length / (n + 1);
  Vec diag = Vec::Constant(n, 2.0 / (h * h));
  Vec sub = Vec::Constant(n - 1, -1.0 / (h * h));
  Eigen::SelfAdjointEigenSolver<Mat> eig;
  eig.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  std::vector<double> out(eig.eigenvalues().data(), eig.eigenvalues().data() + count);
  return out;
}

// Smallest `count` eigenvalues of the 5-point Dirichlet Laplacian on
// (0, Lx) x (0, Ly), by block inverse subspace iteration with Rayleigh-Ritz.
inline std::vector<double> fd_eigenvalues_2d(double lx, double ly, int nx, int ny, int count) {
  const double hx = lx / (nx + 1), hy = ly / (ny + 1);
  const int n = nx * ny;
  auto id = [&](int i, int j) { return j * nx + i; };
  std::vector<Eigen::Triplet<double>> t;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      t.emplace_back(id(i, j), id(i, j), 2.0 / (hx * hx) + 2.0 / (hy * hy));
      if (i > 0) t.emplace_back(id(i, j), id(i - 1, j), -1.0 / (hx * hx));
      if (i + 1 < nx) t.emplace_back(id(i, j), id(i + 1, j), -1.0 / (hx * hx));
      if (j > 0) t.emplace_back(id(i, j), id(i, j - 1), -1.0 / (hy * hy));
      if (j + 1 < ny) t.emplace_back(id(i, j), id(i, j + 1), -1.0 / (hy * hy));
    }
  }
  Eigen::SparseMatrix<double> a(n, n);
  a.setFromTriplets(t.begin(), t.end());
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(a);

  const int block = count + 4;
  Mat x = Mat::Zero(n, block);
  for (int c = 0; c < block; ++c) {
    for (int r = 0; r < n; ++r) x(r, c) = std::sin(0.37 * (r + 1) * (c + 1)) + 0.1 * std::cos(1.3 * r + c);
  }
  Vec ritz;
  for (int it = 0; it < 400; ++it) {
    Mat y = solver.solve(x);
    Eigen::HouseholderQR<Mat> qr(y);
    x = qr.householderQ() * Mat::Identity(n, block);
    const Mat small = x.transpose() * (a * x);
    Eigen::SelfAdjointEigenSolver<Mat> eig(0.5 * (small + small.transpose()));
    x = x * eig.eigenvectors();
    const Vec next = eig.eigenvalues();
    if (ritz.size() == next.size() && ((next - ritz).head(count).array().abs() <= 1e-12 * next.head(count).array()).all()) {
      ritz = next;
      break;
    }
    ritz = next;
  }
  return std::vector<double>(ritz.data(), ritz.data() + count);
}

// Crank-Nicolson for y_t = y_xx + f(x, t) on (0, L), Dirichlet, n interior
// points x_j = j h. The source is constant on each control step of `grid`
// and is given by its nodal values source(i) (one vector per step).
struct HeatFD {
  double length;
  int n;
  double h;
  Vec x;

  HeatFD(double length_, int n_) : length(length_), n(n_), h(length_ / (n_ + 1)), x(n_) {
    for (int j = 0; j < n; ++j) x[j] = (j + 1) * h;
  }

  // Fraction of the cell [x_j - h/2, x_j + h/2] lying inside (a, b).
  Vec indicator(double a, double b) const {
    Vec chi(n);
    for (int j = 0; j < n; ++j) {
      const double lo = std::max(a, x[j] - 0.5 * h), hi = std::min(b, x[j] + 0.5 * h);
      chi[j] = std::max(0.0, hi - lo) / h;
    }
    return chi;
  }

  Vec sine_mode(int k) const {
    Vec v(n);
    for (int j = 0; j < n; ++j) v[j] = std::sqrt(2.0 / length) * std::sin(k * std::numbers::pi * x[j] / length);
    return v;
  }

  // <v, phi_k> by the grid sum (exact for the discrete sine vectors).
  double project(const Vec& v, int k) const { return h * v.dot(sine_mode(k)); }

  Vec run(Vec y, const std::vector<double>& grid, const std::vector<Vec>& sources, int substeps) const {
    const double inv_h2 = 1.0 / (h * h);
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
      const double dt = (grid[i + 1] - grid[i]) / substeps;
      // (I - dt/2 L) y_{n+1} = (I + dt/2 L) y_n + dt f
      const double d = 1.0 + dt * inv_h2, off = -0.5 * dt * inv_h2;
      for (int s = 0; s < substeps; ++s) {
        Vec rhs(n);
        for (int j = 0; j < n; ++j) {
          const double left = j > 0 ? y[j - 1] : 0.0, right = j + 1 < n ? y[j + 1] : 0.0;
          rhs[j] = y[j] + 0.5 * dt * inv_h2 * (left - 2.0 * y[j] + right);
        }
        if (!sources.empty()) rhs += dt * sources[i];
        // Thomas algorithm for the constant tridiagonal system.
        Vec c(n), g(n);
        c[0] = off / d;
        g[0] = rhs[0] / d;
        for (int j = 1; j < n; ++j) {
          const double m = d - off * c[j - 1];
          c[j] = off / m;
          g[j] = (rhs[j] - off * g[j - 1]) / m;
        }
        y[n - 1] = g[n - 1];
        for (int j = n - 2; j >= 0; --j) y[j] = g[j] - c[j] * y[j + 1];
      }
    }
    return y;
  }
};

}  // namespace oracle
