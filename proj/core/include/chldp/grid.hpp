#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "chldp/error.hpp"

namespace chldp {

/// Tensor collocation grid on D = [0, pi]^dim with n midpoints per axis,
/// x_j = (j + 1/2) pi / n.
struct Grid {
  int dim = 1;
  int n = 64;

  std::size_t size() const noexcept {
    return dim == 1 ? static_cast<std::size_t>(n) : static_cast<std::size_t>(n) * n;
  }
  double spacing() const noexcept { return std::numbers::pi / n; }
  /// Cell volume h = (pi/n)^d.
  double cell_volume() const noexcept { return std::pow(spacing(), dim); }
  double point(int j) const noexcept { return (j + 0.5) * spacing(); }

  void validate() const {
    if (dim != 1 && dim != 2) throw InvalidArgument("grid dimension must be 1 or 2");
    if (n < 1) throw InvalidArgument("grid needs at least one point per axis");
  }

  friend bool operator==(const Grid&, const Grid&) = default;
};

/// Multi-index k of a cosine mode with its Laplacian (mu = |k|^2) and
/// biharmonic (lambda = mu^2) eigenvalues.
struct BasisIndex {
  std::array<int, 2> k{0, 0};
  double mu = 0.0;
  double lambda = 0.0;
};

/// Flat index -> multi-index; row-major with the first axis slowest.
inline BasisIndex basis_index(const Grid& grid, std::size_t flat) {
  BasisIndex b;
  if (grid.dim == 1) {
    b.k = {static_cast<int>(flat), 0};
  } else {
    b.k = {static_cast<int>(flat / grid.n), static_cast<int>(flat % grid.n)};
  }
  b.mu = static_cast<double>(b.k[0]) * b.k[0] + static_cast<double>(b.k[1]) * b.k[1];
  b.lambda = b.mu * b.mu;
  return b;
}

/// Point values of a function on the collocation grid.
struct GridField {
  Grid grid;
  std::vector<double> values;

  GridField() = default;
  explicit GridField(Grid g) : grid(g), values(g.size(), 0.0) {}
  GridField(Grid g, std::vector<double> v) : grid(g), values(std::move(v)) {
    if (values.size() != grid.size()) throw InvalidArgument("field length does not match grid");
  }

  std::span<const double> view() const noexcept { return values; }
};

/// Coefficients in the orthonormal Neumann cosine basis, same flat layout as Grid.
struct SpectralField {
  Grid grid;
  std::vector<double> coeffs;

  SpectralField() = default;
  explicit SpectralField(Grid g) : grid(g), coeffs(g.size(), 0.0) {}
  SpectralField(Grid g, std::vector<double> c) : grid(g), coeffs(std::move(c)) {
    if (coeffs.size() != grid.size()) throw InvalidArgument("coefficient length does not match grid");
  }
};

}  // namespace chldp
