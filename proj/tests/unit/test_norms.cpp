#include "doctest.h"
#include "oracles.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "chldp/norms.hpp"
#include "chldp/spectral.hpp"

using namespace chldp;

namespace {
Trajectory random_traj(const Grid& grid, TimeGrid time, std::uint64_t seed) {
  Trajectory u(grid, time);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  for (std::size_t m = 0; m < u.points(); ++m)
    for (double& x : u.at(m)) x = nd(rng);
  return u;
}

ControlPath sampled_control(const Grid& grid, TimeGrid time) {
  ControlPath v(grid, time);
  for (std::size_t m = 0; m < time.steps; ++m) {
    const double t = (static_cast<double>(m) + 0.5) * time.dt;
    for (int j = 0; j < grid.n; ++j) v.at(m)[j] = std::sin(3.0 * t) * std::cos(grid.point(j)) + t * grid.point(j);
  }
  return v;
}
}  // namespace

TEST_SUITE("norms") {
  TEST_CASE("lp norm of constants") {
    const Grid grid{1, 32};
    GridField g(grid);
    g.values.assign(grid.size(), -1.5);
    for (double p : {1.0, 2.0, 3.0, 4.0, 6.5})
      CHECK(lp_norm(g, p) == doctest::Approx(1.5 * std::pow(std::numbers::pi, 1.0 / p)).epsilon(1e-13));
    CHECK(lp_norm(GridField(grid), 4.0) == 0.0);
    CHECK_THROWS_AS(lp_norm(g, 0.5), InvalidArgument);
  }

  TEST_CASE("L2 norm agrees with Parseval") {
    const Grid grid{2, 16};
    std::mt19937_64 rng(1);
    std::normal_distribution<double> nd;
    GridField g(grid);
    for (double& x : g.values) x = nd(rng);
    double s = 0.0;
    for (double a : to_spectral(g).coeffs) s += a * a;
    CHECK(lp_norm(g, 2.0) == doctest::Approx(std::sqrt(s)).epsilon(1e-12));
  }

  TEST_CASE("holder norm of constant-in-time and linear-in-time paths") {
    const Grid grid{1, 16};
    const TimeGrid time{0.1, 10};
    GridField g(grid);
    for (int j = 0; j < grid.n; ++j) g.values[j] = std::cos(2.0 * grid.point(j)) + 0.3;
    Trajectory c(grid, time), lin(grid, time);
    for (std::size_t m = 0; m < c.points(); ++m) {
      for (std::size_t j = 0; j < grid.size(); ++j) {
        c.at(m)[j] = g.values[j];
        lin.at(m)[j] = c.t(m) * g.values[j];
      }
    }
    const double gp = lp_norm(g, 4.0);
    const HolderNorm hc = holder_norm(c, 0.2, 4.0);
    CHECK(hc.increment_term == 0.0);
    CHECK(hc.sup_term == doctest::Approx(gp).epsilon(1e-13));
    const HolderNorm hl = holder_norm(lin, 0.2, 4.0);
    const double T = time.horizon();
    CHECK(hl.sup_term == doctest::Approx(T * gp).epsilon(1e-13));
    CHECK(hl.increment_term == doctest::Approx(gp * std::pow(T, 0.8)).epsilon(1e-12));
  }

  TEST_CASE("holder norm equals the brute-force pair maximum") {
    for (double p : {2.0, 4.0, 5.0}) {
      const Trajectory u = random_traj(Grid{1, 12}, TimeGrid{0.05, 8}, 17);
      CHECK(holder_norm(u, 0.2, p).value() == doctest::Approx(oracle::holder_bruteforce(u, 0.2, p)).epsilon(1e-12));
    }
    const Trajectory u2 = random_traj(Grid{2, 6}, TimeGrid{0.05, 8}, 19);
    CHECK(holder_norm(u2, 0.15, 4.0).value() == doctest::Approx(oracle::holder_bruteforce(u2, 0.15, 4.0)).epsilon(1e-12));
  }

  TEST_CASE("holder distance is the norm of the difference") {
    const Trajectory a = random_traj(Grid{1, 8}, TimeGrid{0.1, 6}, 1);
    const Trajectory b = random_traj(Grid{1, 8}, TimeGrid{0.1, 6}, 2);
    Trajectory d(a.grid(), a.time());
    for (std::size_t i = 0; i < d.points(); ++i)
      for (std::size_t j = 0; j < 8; ++j) d.at(i)[j] = a.at(i)[j] - b.at(i)[j];
    CHECK(holder_distance(a, b, 0.2, 4.0).value() == doctest::Approx(holder_norm(d, 0.2, 4.0).value()).epsilon(1e-13));
  }

  TEST_CASE("holder modulus") {
    const Grid grid{1, 16};
    const TimeGrid time{0.05, 20};
    Trajectory c(grid, time);
    for (std::size_t m = 0; m < c.points(); ++m) c.at(m)[3] = 1.0;
    CHECK(holder_modulus(c, 0.3, 0.5, 4.0) == 0.0);

    Trajectory s(grid, time);
    for (std::size_t m = 0; m < s.points(); ++m)
      for (int j = 0; j < grid.n; ++j) s.at(m)[j] = std::sin(4.0 * s.t(m)) * std::cos(grid.point(j));
    const double T = time.horizon();
    // delta slightly beyond T admits every pair
    CHECK(holder_modulus(s, 0.3, T + 1e-9, 4.0) == doctest::Approx(holder_norm(s, 0.3, 4.0).increment_term));
    const double m1 = holder_modulus(s, 0.3, T, 4.0);
    const double m2 = holder_modulus(s, 0.3, T / 2, 4.0);
    const double m4 = holder_modulus(s, 0.3, T / 4, 4.0);
    CHECK(m1 >= m2);
    CHECK(m2 >= m4);
    CHECK(m1 > m4);
    CHECK_THROWS_AS(holder_modulus(s, 0.3, time.dt, 4.0), InvalidArgument);
  }

  TEST_CASE("control norms") {
    const Grid grid{1, 16};
    const TimeGrid time{0.01, 50};
    CHECK(control_norm_sq(ControlPath(grid, time)) == 0.0);
    ControlPath one(grid, time);
    one.data().assign(one.data().size(), 1.0);
    CHECK(control_norm_sq(one) == doctest::Approx(0.5 * std::numbers::pi).epsilon(1e-13));
    CHECK(control_inner(one, one) == doctest::Approx(control_norm_sq(one)));
    CHECK(in_ball(one, 2.0));
    CHECK_FALSE(in_ball(one, 1.0));

    const double coarse = control_norm_sq(sampled_control(grid, time));
    const double fine = control_norm_sq(sampled_control(Grid{1, 32}, TimeGrid{0.005, 100}));
    CHECK(std::abs(coarse - fine) < 10.0 * time.dt * fine);
  }
}
