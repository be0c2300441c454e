#pragma once

// Spectral representation of the Dirichlet heat semigroup on an interval or a
// rectangle. Fields are stored as coefficient vectors in the orthonormal
// sine eigenbasis, so the semigroup acts diagonally.

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace heatctl {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

class InvalidArgument : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

enum class DomainKind { interval, rectangle };

struct DomainSpec {
  DomainKind kind = DomainKind::interval;
  std::vector<double> lengths;  // one entry per space dimension

  static DomainSpec interval(double length);
  static DomainSpec rectangle(double length_x, double length_y);

  std::size_t dimension() const { return lengths.size(); }
  void validate() const;

  friend bool operator==(const DomainSpec&, const DomainSpec&) = default;
};

// Axis-aligned box (a_d, b_d) per dimension.
struct ControlRegion {
  std::vector<double> lower;
  std::vector<double> upper;

  static ControlRegion interval(double a, double b);
  static ControlRegion rectangle(double ax, double bx, double ay, double by);
  static ControlRegion whole(const DomainSpec& domain);

  void validate(const DomainSpec& domain) const;

  friend bool operator==(const ControlRegion&, const ControlRegion&) = default;
};

// Multi-index of a tensor sine mode; index[d] >= 1.
using ModeIndex = std::vector<int>;

class EigenBasis {
public:
  EigenBasis(DomainSpec domain, std::vector<ModeIndex> modes, Vector lambdas);

  std::size_t size() const { return static_cast<std::size_t>(lambdas_.size()); }
  const Vector& lambdas() const { return lambdas_; }
  double lambda(std::size_t k) const { return lambdas_[static_cast<Eigen::Index>(k)]; }
  const ModeIndex& mode(std::size_t k) const { return modes_[k]; }
  const DomainSpec& domain() const { return domain_; }

  // Value of the k-th orthonormal eigenfunction at a point.
  double eval(std::size_t k, std::span<const double> x) const;

private:
  DomainSpec domain_;
  std::vector<ModeIndex> modes_;
  Vector lambdas_;
};

class SpectralField {
public:
  SpectralField() = default;
  explicit SpectralField(Vector coeffs) : coeffs_(std::move(coeffs)) {}

  static SpectralField zero(std::size_t modes) { return SpectralField(Vector::Zero(static_cast<Eigen::Index>(modes))); }
  // Unit coefficient on mode k (0-based).
  static SpectralField unit(std::size_t modes, std::size_t k);

  std::size_t size() const { return static_cast<std::size_t>(coeffs_.size()); }
  const Vector& coeffs() const { return coeffs_; }
  Vector& coeffs() { return coeffs_; }
  double norm() const { return coeffs_.norm(); }
  double dot(const SpectralField& other) const { return coeffs_.dot(other.coeffs_); }

private:
  Vector coeffs_;
};

// G_jk = <chi_omega phi_j, phi_k>; symmetric, spectrum in [0, 1].
//
// Controls are L^2 functions supported in omega. Only their projection onto
// the retained modes matters, and among controls with a given projection the
// smallest ones live in span{chi_omega phi_k}. We store such a control by its
// coordinates w in the orthonormal frame psi_j = sum_k (G^{-1/2})_jk chi_omega phi_k,
// so ||u||_{L^2} = |w| and the projection of u onto the modes is G^{1/2} w.
class GramMatrix {
public:
  explicit GramMatrix(Matrix g);

  const Matrix& matrix() const { return g_; }
  // Symmetric square root: the control-to-mode injection.
  const Matrix& root() const { return root_; }
  std::size_t size() const { return static_cast<std::size_t>(g_.rows()); }
  double min_eigenvalue() const { return min_eig_; }
  double max_eigenvalue() const { return max_eig_; }

private:
  Matrix g_;
  Matrix root_;
  double min_eig_ = 0.0;
  double max_eig_ = 0.0;
};

// Piecewise-constant control on a time grid 0 = t_0 < ... < t_N = T.
// Column i of `values` holds the spectral coefficients on [t_i, t_{i+1}).
struct ControlProfile {
  std::vector<double> grid;
  Matrix values;

  static ControlProfile zero(std::size_t modes, double horizon, std::size_t steps);

  std::size_t steps() const { return grid.empty() ? 0 : grid.size() - 1; }
  std::size_t modes() const { return static_cast<std::size_t>(values.rows()); }
  double horizon() const { return grid.back(); }
  double step_start(std::size_t i) const { return grid[i]; }
  double step_end(std::size_t i) const { return grid[i + 1]; }
  double step_norm(std::size_t i) const { return values.col(static_cast<Eigen::Index>(i)).norm(); }

  void validate() const;
};

std::vector<double> uniform_grid(double horizon, std::size_t steps);

EigenBasis build_basis(const DomainSpec& domain, std::size_t modes);
GramMatrix control_gram(const DomainSpec& domain, const ControlRegion& region, const EigenBasis& basis);

SpectralField propagate(const SpectralField& y, double t, const EigenBasis& basis);

// Per-mode weights  int_{s0}^{s1} exp(-lambda_k (T - sigma)) d sigma.
Vector decay_integral(const Vector& lambdas, double s0, double s1, double horizon);

// Control coordinates of the function chi_omega * sum_k c_k phi_k.
Vector control_from_synthesis(const GramMatrix& gram, const Vector& c);

// Terminal state y(T) for control switched on over (tau, T).
SpectralField solve_state(const SpectralField& y0, const ControlProfile& u, double tau, double horizon,
                          const EigenBasis& basis, const GramMatrix& gram);

}  // namespace heatctl
