#include "chldp/spectral.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

namespace chldp {

double cosine_mode(int k, double x) noexcept {
  if (k == 0) return 1.0 / std::sqrt(std::numbers::pi);
  return std::sqrt(2.0 / std::numbers::pi) * std::cos(k * x);
}

SpectralOps::SpectralOps(Grid grid) : grid_(grid) {
  grid_.validate();
  const int n = grid_.n;
  basis_.resize(static_cast<std::size_t>(n) * n);
  for (int k = 0; k < n; ++k) {
    for (int j = 0; j < n; ++j) basis_[static_cast<std::size_t>(k) * n + j] = cosine_mode(k, grid_.point(j));
  }
  mu_.resize(grid_.size());
  lambda_.resize(grid_.size());
  for (std::size_t i = 0; i < grid_.size(); ++i) {
    const BasisIndex b = basis_index(grid_, i);
    mu_[i] = b.mu;
    lambda_[i] = b.lambda;
  }
}

// transpose = false: out_k = scale * sum_j B[k][j] in_j (forward direction).
// transpose = true:  out_j = scale * sum_k B[k][j] in_k (inverse direction).
// Applied along every axis of the tensor grid.
void SpectralOps::apply_axis(std::span<const double> in, std::span<double> out, bool transpose,
                             double scale) const {
  const int n = grid_.n;
  auto line = [&](const double* src, std::size_t src_stride, double* dst, std::size_t dst_stride, double factor) {
    for (int r = 0; r < n; ++r) {
      double acc = 0.0;
      if (!transpose) {
        const double* row = &basis_[static_cast<std::size_t>(r) * n];
        for (int c = 0; c < n; ++c) acc += row[c] * src[c * src_stride];
      } else {
        for (int c = 0; c < n; ++c) acc += basis_[static_cast<std::size_t>(c) * n + r] * src[c * src_stride];
      }
      dst[r * dst_stride] = factor * acc;
    }
  };

  if (grid_.dim == 1) {
    line(in.data(), 1, out.data(), 1, scale);
    return;
  }
  // Second axis (contiguous) first, then the first axis.
  std::vector<double> tmp(grid_.size());
  const std::size_t un = static_cast<std::size_t>(n);
  for (std::size_t i = 0; i < un; ++i) line(in.data() + i * un, 1, tmp.data() + i * un, 1, 1.0);
  for (std::size_t j = 0; j < un; ++j) line(tmp.data() + j, un, out.data() + j, un, scale);
}

void SpectralOps::forward(std::span<const double> values, std::span<double> coeffs) const {
  if (values.size() != size() || coeffs.size() != size())
    throw InvalidArgument("transform length does not match grid");
  apply_axis(values, coeffs, false, grid_.cell_volume());
}

void SpectralOps::inverse(std::span<const double> coeffs, std::span<double> values) const {
  if (values.size() != size() || coeffs.size() != size())
    throw InvalidArgument("transform length does not match grid");
  apply_axis(coeffs, values, true, 1.0);
}

const SpectralOps& spectral_ops(const Grid& grid) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::unique_ptr<const SpectralOps>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[{grid.dim, grid.n}];
  if (!slot) slot = std::make_unique<const SpectralOps>(grid);
  return *slot;
}

SpectralField to_spectral(const GridField& g) {
  if (g.values.size() != g.grid.size()) throw InvalidArgument("field length does not match grid");
  SpectralField a(g.grid);
  spectral_ops(g.grid).forward(g.values, a.coeffs);
  return a;
}

GridField from_spectral(const SpectralField& a) {
  if (a.coeffs.size() != a.grid.size()) throw InvalidArgument("coefficient length does not match grid");
  GridField g(a.grid);
  spectral_ops(a.grid).inverse(a.coeffs, g.values);
  return g;
}

SpectralField semigroup_apply(const SpectralField& a, double t) {
  if (!(t >= 0.0)) throw InvalidArgument("semigroup time must be nonnegative");
  const auto lambda = spectral_ops(a.grid).lambda();
  SpectralField out = a;
  for (std::size_t i = 0; i < out.coeffs.size(); ++i) out.coeffs[i] *= std::exp(-lambda[i] * t);
  return out;
}

SpectralField laplacian_apply(const SpectralField& a) {
  const auto mu = spectral_ops(a.grid).mu();
  SpectralField out = a;
  for (std::size_t i = 0; i < out.coeffs.size(); ++i) out.coeffs[i] *= -mu[i];
  return out;
}

double green_kernel_eval(double t, std::span<const double> x, std::span<const double> y, int K) {
  if (x.size() != y.size() || x.empty() || x.size() > 2)
    throw InvalidArgument("kernel points must share dimension 1 or 2");
  if (K < 0) throw InvalidArgument("kernel truncation must be nonnegative");
  if (!(t > 0.0)) {
    // G_0 is a delta distribution; no pointwise value exists.
    throw InvalidArgument("green kernel is not evaluable at t <= 0");
  }
  // Per-axis products e_k(x) e_k(y), then the (|k|^2)^2 decay couples the axes.
  std::vector<double> px(static_cast<std::size_t>(K) + 1), py(static_cast<std::size_t>(K) + 1);
  for (int k = 0; k <= K; ++k) px[k] = cosine_mode(k, x[0]) * cosine_mode(k, y[0]);
  if (x.size() == 1) {
    double sum = 0.0;
    for (int k = K; k >= 0; --k) {
      const double lam = static_cast<double>(k) * k * k * k;
      sum += std::exp(-lam * t) * px[k];
    }
    return sum;
  }
  for (int k = 0; k <= K; ++k) py[k] = cosine_mode(k, x[1]) * cosine_mode(k, y[1]);
  double sum = 0.0;
  for (int k1 = K; k1 >= 0; --k1) {
    for (int k2 = K; k2 >= 0; --k2) {
      const double mu = static_cast<double>(k1) * k1 + static_cast<double>(k2) * k2;
      sum += std::exp(-mu * mu * t) * px[k1] * py[k2];
    }
  }
  return sum;
}

}  // namespace chldp
