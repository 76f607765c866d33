#include "doctest.h"
#include "oracles.hpp"

#include <cmath>
#include <numbers>

#include "chldp/decomposition.hpp"
#include "chldp/integrator.hpp"
#include "chldp/norms.hpp"
#include "chldp/spectral.hpp"
#include "chldp/stats.hpp"

using namespace chldp;

namespace {
GridField cosine(const Grid& grid, double amp, int k) {
  GridField g(grid);
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const int i0 = grid.dim == 1 ? static_cast<int>(j) : static_cast<int>(j) / grid.n;
    g.values[j] = amp * std::cos(k * grid.point(i0));
  }
  return g;
}
double spatial_mean(std::span<const double> u) {
  double s = 0.0;
  for (double x : u) s += x;
  return s / static_cast<double>(u.size());
}
}  // namespace

TEST_SUITE("dynamics") {
  TEST_CASE("drift polynomial") {
    const ModelSpec spec;
    CHECK(spec.f_eval(0.0) == 0.0);
    CHECK(spec.f_eval(1.0) == 0.0);
    CHECK(spec.f_eval(-1.0) == 0.0);
    CHECK(spec.f_eval(2.0) == 24.0);
    CHECK(spec.f_prime(0.0) == -4.0);
    CHECK(spec.f_prime(1.0) == 8.0);
  }

  TEST_CASE("sigma presets are bounded and Lipschitz") {
    for (SigmaKind kind : {SigmaKind::constant, SigmaKind::bounded_rational, SigmaKind::clipped_linear}) {
      const SigmaPreset s{kind, 0.7, 1.3};
      for (double u = -5.0; u <= 5.0; u += 0.01) {
        CHECK(std::abs(s.eval(u)) <= s.sup_bound() + 1e-15);
        CHECK(std::abs(s.derivative(u)) <= s.lipschitz() + 1e-15);
      }
      CHECK(SigmaPreset::parse_kind(s.name()) == kind);
    }
  }

  TEST_CASE("one step: constant equilibrium and zero state") {
    const Grid grid{1, 16};
    GridField c(grid);
    c.values.assign(grid.size(), 0.3);
    const GridField next = step(c, {}, {}, 0.0, 1e-3, ModelSpec{});
    for (double x : next.values) CHECK(x == doctest::Approx(0.3).epsilon(1e-14));
    const GridField z = step(GridField(grid), {}, {}, 0.0, 1e-3, ModelSpec{});
    for (double x : z.values) CHECK(x == 0.0);
  }

  TEST_CASE("linear flow is exact on an eigenmode") {
    const Grid grid{1, 16};
    const SolverConfig cfg{grid, TimeGrid{1e-4, 10000}};
    const Trajectory u = solve_skeleton(cosine(grid, 1.0, 1), ControlPath(grid, cfg.time), ModelSpec::linear(0.0), cfg);
    for (std::size_t m : {std::size_t{1}, std::size_t{5000}, std::size_t{10000}}) {
      for (int j = 0; j < grid.n; ++j)
        CHECK(std::abs(u.at(m)[j] - std::exp(-u.t(m)) * std::cos(grid.point(j))) < 1e-12);
    }
  }

  TEST_CASE("skeleton with zero data stays zero and conserves mass") {
    const Grid grid{1, 64};
    const SolverConfig cfg{grid, TimeGrid{1e-4, 5000}};
    const Trajectory z = solve_skeleton(GridField(grid), ControlPath(grid, cfg.time), ModelSpec{}, cfg);
    for (double x : z.data()) CHECK(x == 0.0);

    GridField u0 = cosine(grid, 0.5, 1);
    for (int j = 0; j < grid.n; ++j) u0.values[j] += 0.2 + 0.1 * std::cos(3.0 * grid.point(j));
    const Trajectory u = solve_skeleton(u0, ControlPath(grid, cfg.time), ModelSpec{}, cfg);
    const double m0 = spatial_mean(u.at(0));
    double drift = 0.0;
    for (std::size_t m = 0; m < u.points(); ++m) drift = std::max(drift, std::abs(spatial_mean(u.at(m)) - m0));
    CHECK(drift < 1e-10);
  }

  TEST_CASE("impulse response matches the refined scheme") {
    const Grid grid{1, 16};
    const double T = 0.02;
    auto endpoint = [&](std::size_t steps) {
      const SolverConfig cfg{grid, TimeGrid{T / static_cast<double>(steps), steps}};
      ControlPath v(grid, cfg.time);
      for (std::size_t m = 0; m < steps; ++m) v.at(m)[5] = 1.0;  // one cell, all times
      return solve_skeleton(GridField(grid), v, ModelSpec::linear(1.0), cfg).field(steps);
    };
    const GridField coarse = endpoint(20);
    const GridField fine = endpoint(320);
    for (std::size_t j = 0; j < grid.size(); ++j) CHECK(std::abs(coarse.values[j] - fine.values[j]) < 1e-4);
  }

  TEST_CASE("linear endpoint equals the dense Duhamel oracle") {
    const Grid grid{1, 16};
    const SolverConfig cfg{grid, TimeGrid{0.025, 20}};
    ControlPath v(grid, cfg.time);
    std::mt19937_64 rng(4);
    std::normal_distribution<double> nd;
    for (double& x : v.data()) x = nd(rng);
    const GridField u0 = cosine(grid, 0.4, 2);
    const Eigen::VectorXd u0e = Eigen::Map<const Eigen::VectorXd>(u0.values.data(), grid.n);
    const oracle::LinearEndpoint le = oracle::linear_endpoint(grid.n, 20, 0.025, 1.0, u0e);
    const Eigen::VectorXd a = le.free + le.L * Eigen::Map<const Eigen::VectorXd>(v.data().data(), v.data().size());
    const Eigen::VectorXd expect = le.C.transpose() * a;
    const GridField got = solve_skeleton(u0, v, ModelSpec::linear(1.0), cfg).field(20);
    for (int j = 0; j < grid.n; ++j) CHECK(got.values[j] == doctest::Approx(expect(j)).epsilon(1e-11));
  }

  TEST_CASE("stochastic solve reduces to the skeleton") {
    const Grid grid{1, 16};
    const SolverConfig cfg{grid, TimeGrid{1e-3, 100}};
    const NoisePath w = sample_sheet(grid, cfg.time, SeedSpec{1, 0});
    ControlPath v(grid, cfg.time);
    for (std::size_t m = 0; m < cfg.time.steps; ++m) v.at(m)[2] = 0.5;
    const GridField u0 = cosine(grid, 0.3, 1);
    const Trajectory skel = solve_skeleton(u0, v, ModelSpec{}, cfg);
    CHECK(solve_stochastic(u0, w, &v, 0.0, ModelSpec{}, cfg).data() == skel.data());
    ModelSpec quiet;
    quiet.sigma = {SigmaKind::constant, 0.0, 1.0};
    CHECK(solve_stochastic(u0, w, &v, 0.5, quiet, cfg).data() == solve_skeleton(u0, v, quiet, cfg).data());
  }

  TEST_CASE("mild residual and Duhamel fixed point") {
    const Grid grid{1, 32};
    const SolverConfig cfg{grid, TimeGrid{1e-3, 200}};
    const NoisePath w = sample_sheet(grid, cfg.time, SeedSpec{2, 0});
    ModelSpec spec;
    spec.sigma = {SigmaKind::bounded_rational, 1.0, 1.0};
    const GridField u0 = cosine(grid, 0.5, 2);
    const Trajectory u = solve_stochastic(u0, w, nullptr, 0.01, spec, cfg);
    CHECK(mild_residual(u, u0, nullptr, &w, 0.01, spec) < 1e-10);

    ControlPath v(grid, cfg.time);
    for (std::size_t m = 0; m < cfg.time.steps; ++m) v.at(m)[7] = 1.0;
    const Trajectory s = solve_skeleton(u0, v, spec, cfg);
    const Trajectory r = duhamel_map(s, u0, &v, spec);
    for (std::size_t i = 0; i < s.data().size(); ++i) CHECK(std::abs(r.data()[i] - s.data()[i]) < 1e-12);
  }

  TEST_CASE("step bound and blow-up abort with the step index") {
    const Grid grid{1, 64};
    const SolverConfig cfg{grid, TimeGrid{1e-2, 10}};
    const ExponentialEuler scheme(ModelSpec{}, cfg);
    CHECK(scheme.drift_slope_limit() > 0.0);
    GridField big(grid);
    big.values.assign(grid.size(), 50.0);
    try {
      solve_skeleton(big, ControlPath(grid, cfg.time), ModelSpec{}, cfg);
      FAIL("expected abort");
    } catch (const SolverAbort& e) {
      CHECK(e.step() == 0);
    }
    SolverConfig loose = cfg;
    loose.enforce_step_bound = false;
    loose.blowup_threshold = 10.0;
    GridField wave = cosine(grid, 30.0, 1);
    CHECK_THROWS_AS(solve_skeleton(wave, ControlPath(grid, cfg.time), ModelSpec{}, loose), SolverAbort);
  }

  TEST_CASE("fourth moments are stable under time-step halving") {
    const Grid grid{1, 64};
    const std::size_t R = 200;
    const TimeGrid fine_t{5e-5, 2000}, coarse_t{1e-4, 1000};
    const GridField u0 = cosine(grid, 0.1, 1);
    std::vector<Trajectory> fine(R), coarse(R);
    for (std::size_t r = 0; r < R; ++r) {
      const NoisePath w = sample_sheet(grid, fine_t, SeedSpec{31, r});
      fine[r] = solve_stochastic(u0, w, nullptr, 1e-2, ModelSpec{}, SolverConfig{grid, fine_t});
      coarse[r] = solve_stochastic(u0, coarsen_in_time(w), nullptr, 1e-2, ModelSpec{}, SolverConfig{grid, coarse_t});
    }
    const double mf = moment_sup(fine, 4.0, 4.0);
    const double mc = moment_sup(coarse, 4.0, 4.0);
    CHECK(std::isfinite(mf));
    CHECK(std::abs(mf - mc) / mf < 0.05);
  }

  TEST_CASE("J decomposition") {
    const Grid grid{1, 32};
    const SolverConfig cfg{grid, TimeGrid{1e-3, 100}};
    const GridField u0 = cosine(grid, 0.3, 1);
    ControlPath v(grid, cfg.time);
    for (std::size_t m = 0; m < cfg.time.steps; ++m)
      for (int j = 0; j < grid.n; ++j) v.at(m)[j] = std::cos(grid.point(j));
    const Trajectory skel = solve_skeleton(u0, v, ModelSpec{}, cfg);
    const NoisePath w = sample_sheet(grid, cfg.time, SeedSpec{8, 0});

    const JDecomposition zero = j_decomposition(skel, skel, w, v, v, 0.0, ModelSpec{}, 4.0);
    for (const auto* s : {&zero.j1, &zero.j2, &zero.j3, &zero.j4})
      for (double x : *s) CHECK(x == 0.0);

    ModelSpec rational;
    rational.sigma = {SigmaKind::bounded_rational, 1.0, 1.0};
    ControlPath v_eps = v;
    for (double& x : v_eps.data()) x *= 1.1;
    const Trajectory u = solve_stochastic(u0, w, &v_eps, 1e-2, rational, cfg);
    const Trajectory sk = solve_skeleton(u0, v, rational, cfg);
    const JDecomposition jd = j_decomposition(u, sk, w, v_eps, v, 1e-2, rational, 4.0);
    CHECK(jd.recombination_residual < 1e-10);
    CHECK(*std::max_element(jd.j4.begin(), jd.j4.end()) > 0.0);

    const Trajectory uc = solve_stochastic(u0, w, &v, 1e-2, ModelSpec{}, cfg);
    const JDecomposition jc = j_decomposition(uc, skel, w, v, v, 1e-2, ModelSpec{}, 4.0);
    for (double x : jc.j4) CHECK(x == 0.0);
    for (double x : jc.j3) CHECK(x == 0.0);
  }

  TEST_CASE("J1 scales like the square root of the noise level") {
    const Grid grid{1, 32};
    const SolverConfig cfg{grid, TimeGrid{1e-3, 100}};
    const GridField u0 = cosine(grid, 0.3, 1);
    const ControlPath v(grid, cfg.time);
    const Trajectory skel = solve_skeleton(u0, v, ModelSpec{}, cfg);
    std::vector<double> eps{1e-2, 1e-3, 1e-4}, mean_j1;
    for (double e : eps) {
      std::vector<double> sups(100);
      for (std::size_t r = 0; r < sups.size(); ++r) {
        const NoisePath w = sample_sheet(grid, cfg.time, SeedSpec{12, r});
        const Trajectory u = solve_stochastic(u0, w, &v, e, ModelSpec{}, cfg);
        const JDecomposition jd = j_decomposition(u, skel, w, v, v, e, ModelSpec{}, 4.0);
        sups[r] = *std::max_element(jd.j1.begin(), jd.j1.end());
      }
      mean_j1.push_back(stats::mean(sups));
    }
    const auto fit = stats::loglog_fit(eps, mean_j1);
    CHECK(fit.slope == doctest::Approx(0.5).epsilon(0.2));
  }
}
