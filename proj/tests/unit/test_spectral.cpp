#include "doctest.h"
#include "oracles.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include "chldp/spectral.hpp"

using namespace chldp;

namespace {
GridField random_field(const Grid& grid, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  GridField g(grid);
  for (double& x : g.values) x = nd(rng);
  return g;
}
double l2_grid(const GridField& g) {
  double s = 0.0;
  for (double x : g.values) s += x * x;
  return std::sqrt(g.grid.cell_volume() * s);
}
double l2_coeffs(const SpectralField& a) {
  double s = 0.0;
  for (double x : a.coeffs) s += x * x;
  return std::sqrt(s);
}
}  // namespace

TEST_SUITE("spectral") {
  TEST_CASE("constant field maps to the zero mode") {
    for (int dim : {1, 2}) {
      const Grid grid{dim, 16};
      GridField g(grid);
      g.values.assign(grid.size(), 2.5);
      const SpectralField a = to_spectral(g);
      CHECK(a.coeffs[0] == doctest::Approx(2.5 * std::pow(std::numbers::pi, dim / 2.0)).epsilon(1e-14));
      for (std::size_t k = 1; k < a.coeffs.size(); ++k) CHECK(std::abs(a.coeffs[k]) < 1e-13);
    }
  }

  TEST_CASE("cos(x) excites only mode one") {
    const Grid grid{1, 32};
    GridField g(grid);
    for (int j = 0; j < grid.n; ++j) g.values[j] = std::cos(grid.point(j));
    const SpectralField a = to_spectral(g);
    CHECK(a.coeffs[1] == doctest::Approx(std::sqrt(std::numbers::pi / 2.0)).epsilon(1e-14));
    for (std::size_t k = 0; k < a.coeffs.size(); ++k)
      if (k != 1) CHECK(std::abs(a.coeffs[k]) < 1e-13);
  }

  TEST_CASE("transform matches the dense cosine matrix") {
    const Grid grid{1, 24};
    std::mt19937_64 rng(3);
    const GridField g = random_field(grid, rng);
    const Eigen::MatrixXd C = oracle::cosine_matrix(grid.n);
    const Eigen::VectorXd expect = grid.cell_volume() * C * Eigen::Map<const Eigen::VectorXd>(g.values.data(), grid.n);
    const SpectralField a = to_spectral(g);
    for (int k = 0; k < grid.n; ++k) CHECK(a.coeffs[k] == doctest::Approx(expect(k)).epsilon(1e-12));
    for (int k = 0; k < grid.n; ++k) CHECK(spectral_ops(grid).basis(k, 5) == doctest::Approx(C(k, 5)).epsilon(1e-14));
  }

  TEST_CASE("round trip and Parseval on random fields") {
    std::mt19937_64 rng(11);
    for (int dim : {1, 2}) {
      for (int n : {8, 64}) {
        const Grid grid{dim, n};
        for (int rep = 0; rep < 5; ++rep) {
          const GridField g = random_field(grid, rng);
          const SpectralField a = to_spectral(g);
          const GridField back = from_spectral(a);
          double err = 0.0, scale = 0.0;
          for (std::size_t j = 0; j < g.values.size(); ++j) {
            err = std::max(err, std::abs(back.values[j] - g.values[j]));
            scale = std::max(scale, std::abs(g.values[j]));
          }
          CHECK(err / scale < 1e-12);
          CHECK(l2_coeffs(a) == doctest::Approx(l2_grid(g)).epsilon(1e-12));
        }
      }
    }
  }

  TEST_CASE("semigroup") {
    const Grid grid{1, 8};
    SpectralField a(grid);
    a.coeffs[0] = 1.0;
    a.coeffs[1] = 2.0;
    a.coeffs[3] = -1.0;
    const SpectralField same = semigroup_apply(a, 0.0);
    CHECK(same.coeffs == a.coeffs);
    const SpectralField later = semigroup_apply(a, std::log(2.0));
    CHECK(later.coeffs[0] == 1.0);
    CHECK(later.coeffs[1] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(later.coeffs[3] == doctest::Approx(-std::pow(2.0, -81.0)).epsilon(1e-12));
    CHECK(semigroup_apply(a, 50.0).coeffs[0] == 1.0);
    CHECK_THROWS_AS(semigroup_apply(a, -1e-3), InvalidArgument);
  }

  TEST_CASE("laplacian eigenvalues") {
    const Grid grid{1, 16};
    SpectralField a(grid);
    a.coeffs[0] = 3.0;
    a.coeffs[1] = 1.0;
    a.coeffs[2] = 1.0;
    const SpectralField la = laplacian_apply(a);
    CHECK(la.coeffs[0] == 0.0);
    CHECK(la.coeffs[1] == -1.0);
    CHECK(la.coeffs[2] == -4.0);

    const Grid g2{2, 8};
    SpectralField b(g2);
    b.coeffs[2 * 8 + 3] = 1.0;  // k = (2, 3)
    CHECK(laplacian_apply(b).coeffs[2 * 8 + 3] == -13.0);
    CHECK(spectral_ops(g2).lambda()[2 * 8 + 3] == 169.0);
  }

  TEST_CASE("green kernel: symmetry, unit mass, long-time limit") {
    const int K = 64;
    for (double t : {0.01, 0.1, 1.0}) {
      for (double x : {0.1, 1.0, 2.5}) {
        for (double y : {0.3, 1.7, 3.0}) {
          const std::array<double, 1> xa{x}, ya{y};
          CHECK(std::abs(green_kernel_eval(t, xa, ya, K) - green_kernel_eval(t, ya, xa, K)) < 1e-12);
        }
        // midpoint quadrature in y integrates every k >= 1 mode to zero exactly
        const int q = 400;
        double mass = 0.0;
        for (int j = 0; j < q; ++j) {
          const std::array<double, 1> xa{x}, ya{(j + 0.5) * std::numbers::pi / q};
          mass += green_kernel_eval(t, xa, ya, K) * std::numbers::pi / q;
        }
        CHECK(std::abs(mass - 1.0) < 1e-10);
      }
    }
    const std::array<double, 1> xa{0.4}, ya{2.9};
    CHECK(green_kernel_eval(50.0, xa, ya, K) == doctest::Approx(1.0 / std::numbers::pi).epsilon(1e-14));
    CHECK_THROWS_AS(green_kernel_eval(0.0, xa, ya, K), InvalidArgument);
  }

  TEST_CASE("green kernel reproduces the semigroup on a mode") {
    const std::array<double, 1> xa{0.8}, ya{2.2};
    const double t = 0.3;
    double expect = 0.0;
    for (int k = 0; k <= 20; ++k) expect += std::exp(-std::pow(k, 4.0) * t) * oracle::mode(k, 0.8) * oracle::mode(k, 2.2);
    CHECK(green_kernel_eval(t, xa, ya, 20) == doctest::Approx(expect).epsilon(1e-13));
  }

  TEST_CASE("cosine_mode") {
    CHECK(cosine_mode(0, 1.3) == doctest::Approx(1.0 / std::sqrt(std::numbers::pi)));
    CHECK(cosine_mode(2, 0.0) == doctest::Approx(std::sqrt(2.0 / std::numbers::pi)));
  }
}
