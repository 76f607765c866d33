#pragma once

#include <span>
#include <vector>

#include "chldp/grid.hpp"

namespace chldp {

/// Orthonormal Neumann cosine basis on [0, pi]^d sampled on the midpoint grid.
///
/// e_0 = pi^{-1/2}, e_k(x) = (2/pi)^{1/2} cos(k x) per axis; tensor products in 2-D.
/// On the midpoint grid the discrete inner product h * sum_j e_k(x_j) e_l(x_j)
/// is exactly the identity for k, l < n, so the transform pair below is an
/// orthogonal change of coordinates and Parseval holds to round-off.
class SpectralOps {
 public:
  explicit SpectralOps(Grid grid);

  const Grid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return grid_.size(); }

  /// Grid values -> coefficients: a_k = h * sum_j e_k(x_j) g_j.
  void forward(std::span<const double> values, std::span<double> coeffs) const;
  /// Coefficients -> grid values: g_j = sum_k a_k e_k(x_j).
  void inverse(std::span<const double> coeffs, std::span<double> values) const;

  /// Laplacian eigenvalue |k|^2 per flat mode.
  std::span<const double> mu() const noexcept { return mu_; }
  /// Biharmonic eigenvalue |k|^4 per flat mode.
  std::span<const double> lambda() const noexcept { return lambda_; }

  /// 1-D basis value e_k(x_j); row k, column j.
  double basis(int k, int j) const noexcept { return basis_[static_cast<std::size_t>(k) * grid_.n + j]; }

 private:
  void apply_axis(std::span<const double> in, std::span<double> out, bool transpose, double scale) const;

  Grid grid_;
  std::vector<double> basis_;  // n x n, e_k(x_j)
  std::vector<double> mu_;
  std::vector<double> lambda_;
};

/// Shared, immutable operator for a grid. Construction is cached per (dim, n).
const SpectralOps& spectral_ops(const Grid& grid);

/// 1-D orthonormal cosine mode evaluated at an arbitrary point.
double cosine_mode(int k, double x) noexcept;

SpectralField to_spectral(const GridField& g);
GridField from_spectral(const SpectralField& a);

/// Green semigroup of d/dt + Delta^2: a_k -> exp(-lambda_k t) a_k. Rejects t < 0.
SpectralField semigroup_apply(const SpectralField& a, double t);

/// Delta acts as -mu_k.
SpectralField laplacian_apply(const SpectralField& a);

/// Truncated eigen-expansion G_t(x, y) = sum_{|k|_inf <= K} exp(-lambda_k t) e_k(x) e_k(y).
/// Points have `dim` meaningful entries. t must be strictly positive.
double green_kernel_eval(double t, std::span<const double> x, std::span<const double> y, int K);

}  // namespace chldp
