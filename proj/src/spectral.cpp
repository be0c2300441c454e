#include "heatctl/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace heatctl {

namespace {

constexpr double kPi = std::numbers::pi;

// (2/L) * int_a^b sin(j pi x / L) sin(k pi x / L) dx, closed form.
double sine_overlap(int j, int k, double a, double b, double length) {
  auto sin_integral = [&](double c) {  // int_a^b cos(c x) dx
    return (std::sin(c * b) - std::sin(c * a)) / c;
  };
  const double c_sum = (j + k) * kPi / length;
  if (j == k) {
    return ((b - a) - sin_integral(c_sum)) / length;
  }
  const double c_diff = (j - k) * kPi / length;
  return (sin_integral(c_diff) - sin_integral(c_sum)) / length;
}

}  // namespace

DomainSpec DomainSpec::interval(double length) { return {DomainKind::interval, {length}}; }

DomainSpec DomainSpec::rectangle(double length_x, double length_y) {
  return {DomainKind::rectangle, {length_x, length_y}};
}

void DomainSpec::validate() const {
  const std::size_t want = kind == DomainKind::interval ? 1 : 2;
  if (lengths.size() != want) {
    throw InvalidArgument("domain: expected " + std::to_string(want) + " length(s)");
  }
  for (double l : lengths) {
    if (!(l > 0.0) || !std::isfinite(l)) throw InvalidArgument("domain: lengths must be positive and finite");
  }
}

ControlRegion ControlRegion::interval(double a, double b) { return {{a}, {b}}; }

ControlRegion ControlRegion::rectangle(double ax, double bx, double ay, double by) { return {{ax, ay}, {bx, by}}; }

ControlRegion ControlRegion::whole(const DomainSpec& domain) {
  return {std::vector<double>(domain.dimension(), 0.0), domain.lengths};
}

void ControlRegion::validate(const DomainSpec& domain) const {
  if (lower.size() != domain.dimension() || upper.size() != domain.dimension()) {
    throw InvalidArgument("control region: dimension does not match the domain");
  }
  for (std::size_t d = 0; d < lower.size(); ++d) {
    if (!(lower[d] < upper[d])) throw InvalidArgument("control region: degenerate side (lower >= upper)");
    if (lower[d] < 0.0 || upper[d] > domain.lengths[d]) {
      throw InvalidArgument("control region: not contained in the domain");
    }
  }
}

EigenBasis::EigenBasis(DomainSpec domain, std::vector<ModeIndex> modes, Vector lambdas)
    : domain_(std::move(domain)), modes_(std::move(modes)), lambdas_(std::move(lambdas)) {}

double EigenBasis::eval(std::size_t k, std::span<const double> x) const {
  double value = 1.0;
  const auto& idx = modes_[k];
  for (std::size_t d = 0; d < idx.size(); ++d) {
    const double l = domain_.lengths[d];
    value *= std::sqrt(2.0 / l) * std::sin(idx[d] * kPi * x[d] / l);
  }
  return value;
}

SpectralField SpectralField::unit(std::size_t modes, std::size_t k) {
  Vector v = Vector::Zero(static_cast<Eigen::Index>(modes));
  v[static_cast<Eigen::Index>(k)] = 1.0;
  return SpectralField(std::move(v));
}

GramMatrix::GramMatrix(Matrix g) : g_(std::move(g)) {
  if (g_.rows() != g_.cols()) throw InvalidArgument("gram matrix must be square");
  const double asym = (g_ - g_.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12) throw InvalidArgument("gram matrix is not symmetric");
  g_ = 0.5 * (g_ + g_.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(g_);
  min_eig_ = eig.eigenvalues().minCoeff();
  max_eig_ = eig.eigenvalues().maxCoeff();
  const Vector roots = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  root_ = eig.eigenvectors() * roots.asDiagonal() * eig.eigenvectors().transpose();
  root_ = 0.5 * (root_ + root_.transpose());
  if (min_eig_ < -1e-10 || max_eig_ > 1.0 + 1e-10) {
    std::ostringstream msg;
    msg << "gram matrix spectrum outside [0,1]: [" << min_eig_ << ", " << max_eig_ << "]";
    throw InvalidArgument(msg.str());
  }
}

ControlProfile ControlProfile::zero(std::size_t modes, double horizon, std::size_t steps) {
  return {uniform_grid(horizon, steps), Matrix::Zero(static_cast<Eigen::Index>(modes), static_cast<Eigen::Index>(steps))};
}

void ControlProfile::validate() const {
  if (grid.size() < 2) throw InvalidArgument("control grid needs at least one step");
  if (grid.front() != 0.0) throw InvalidArgument("control grid must start at 0");
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    if (!(grid[i] < grid[i + 1])) throw InvalidArgument("control grid must be strictly increasing");
  }
  if (static_cast<std::size_t>(values.cols()) != steps()) {
    throw InvalidArgument("control values do not match the number of grid steps");
  }
  if (!values.allFinite()) throw InvalidArgument("control values must be finite");
}

std::vector<double> uniform_grid(double horizon, std::size_t steps) {
  if (steps == 0) throw InvalidArgument("time grid needs at least one step");
  std::vector<double> grid(steps + 1);
  for (std::size_t i = 0; i <= steps; ++i) grid[i] = horizon * static_cast<double>(i) / static_cast<double>(steps);
  grid.back() = horizon;
  return grid;
}

EigenBasis build_basis(const DomainSpec& domain, std::size_t modes) {
  if (modes == 0) throw InvalidArgument("build_basis: mode count must be >= 1");
  domain.validate();

  std::vector<ModeIndex> indices;
  if (domain.kind == DomainKind::interval) {
    for (std::size_t k = 1; k <= modes; ++k) indices.push_back({static_cast<int>(k)});
  } else {
    // Every (m, n) among the K lowest eigenvalues has m, n <= K.
    std::vector<std::pair<double, ModeIndex>> all;
    const int n_max = static_cast<int>(modes);
    for (int m = 1; m <= n_max; ++m) {
      for (int n = 1; n <= n_max; ++n) {
        const double lx = m * kPi / domain.lengths[0];
        const double ly = n * kPi / domain.lengths[1];
        all.push_back({lx * lx + ly * ly, {m, n}});
      }
    }
    std::stable_sort(all.begin(), all.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t k = 0; k < modes; ++k) indices.push_back(all[k].second);
  }

  Vector lambdas(static_cast<Eigen::Index>(modes));
  for (std::size_t k = 0; k < modes; ++k) {
    double lambda = 0.0;
    for (std::size_t d = 0; d < indices[k].size(); ++d) {
      const double w = indices[k][d] * kPi / domain.lengths[d];
      lambda += w * w;
    }
    lambdas[static_cast<Eigen::Index>(k)] = lambda;
  }
  return EigenBasis(domain, std::move(indices), std::move(lambdas));
}

GramMatrix control_gram(const DomainSpec& domain, const ControlRegion& region, const EigenBasis& basis) {
  region.validate(domain);
  const auto n = static_cast<Eigen::Index>(basis.size());
  Matrix g(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index k = 0; k <= j; ++k) {
      const auto& mj = basis.mode(static_cast<std::size_t>(j));
      const auto& mk = basis.mode(static_cast<std::size_t>(k));
      double value = 1.0;
      for (std::size_t d = 0; d < mj.size(); ++d) {
        value *= sine_overlap(mj[d], mk[d], region.lower[d], region.upper[d], domain.lengths[d]);
      }
      g(j, k) = value;
      g(k, j) = value;
    }
  }
  return GramMatrix(std::move(g));
}

SpectralField propagate(const SpectralField& y, double t, const EigenBasis& basis) {
  if (!(t >= 0.0)) throw InvalidArgument("propagate: time must be non-negative");
  if (y.size() != basis.size()) throw InvalidArgument("propagate: field size does not match the basis");
  return SpectralField(y.coeffs().cwiseProduct((-basis.lambdas() * t).array().exp().matrix()));
}

Vector decay_integral(const Vector& lambdas, double s0, double s1, double horizon) {
  Vector out = Vector::Zero(lambdas.size());
  if (!(s1 > s0)) return out;
  for (Eigen::Index k = 0; k < lambdas.size(); ++k) {
    const double lambda = lambdas[k];
    out[k] = std::exp(-lambda * (horizon - s1)) * (-std::expm1(-lambda * (s1 - s0))) / lambda;
  }
  return out;
}

Vector control_from_synthesis(const GramMatrix& gram, const Vector& c) {
  if (static_cast<std::size_t>(c.size()) != gram.size()) throw InvalidArgument("control_from_synthesis: size mismatch");
  return gram.root() * c;
}

SpectralField solve_state(const SpectralField& y0, const ControlProfile& u, double tau, double horizon,
                          const EigenBasis& basis, const GramMatrix& gram) {
  if (!(tau >= 0.0) || !(tau < horizon)) throw InvalidArgument("solve_state: need 0 <= tau < T");
  if (y0.size() != basis.size() || gram.size() != basis.size()) {
    throw InvalidArgument("solve_state: size mismatch between state, basis and gram matrix");
  }
  u.validate();
  if (u.modes() != basis.size()) throw InvalidArgument("solve_state: control mode count mismatch");
  if (std::abs(u.horizon() - horizon) > 1e-12 * horizon) throw InvalidArgument("solve_state: control grid does not end at T");

  Vector y = propagate(y0, horizon, basis).coeffs();
  for (std::size_t i = 0; i < u.steps(); ++i) {
    const double s0 = std::max(u.step_start(i), tau);
    const double s1 = u.step_end(i);
    if (s1 <= s0) continue;
    y += decay_integral(basis.lambdas(), s0, s1, horizon).cwiseProduct(gram.root() * u.values.col(static_cast<Eigen::Index>(i)));
  }
  return SpectralField(std::move(y));
}

}  // namespace heatctl
