#include "doctest.h"
#include "oracles.hpp"

#include <cmath>
#include <numbers>

#include "chldp/ldp.hpp"
#include "chldp/norms.hpp"
#include "chldp/spectral.hpp"
#include "chldp/stats.hpp"

using namespace chldp;

namespace {

const Grid kGrid{1, 16};
const SolverConfig kCfg{kGrid, TimeGrid{0.005, 20}};

GridField cosine(double amp, int k) {
  GridField g(kGrid);
  for (int j = 0; j < kGrid.n; ++j) g.values[j] = amp * std::cos(k * kGrid.point(j));
  return g;
}

McSetup setup_for(const ModelSpec& spec) { return McSetup{cosine(0.3, 1), spec, kCfg, 0}; }

GridField free_endpoint(const McSetup& s) {
  const ExponentialEuler scheme(s.spec, s.config);
  const Trajectory u = scheme.integrate(s.u0, nullptr, nullptr, 0.0);
  return u.field(u.steps());
}

// Entry target shifted along the constant mode.
GridField shifted_centre(const McSetup& s, double c) {
  GridField g = free_endpoint(s);
  for (double& x : g.values) x += c * cosine_mode(0, 0.0);
  return g;
}

}  // namespace

TEST_SUITE("ldp") {
  TEST_CASE("certain and impossible events") {
    const McSetup s = setup_for(ModelSpec{});
    const GridField g = free_endpoint(s);
    const ProbabilityEstimate all = mc_event_probability(EventSpec::terminal_exit(g, 0.0), 0.1, 50, 1, s);
    CHECK(all.p_hat == 1.0);
    CHECK(all.eps_log_p == 0.0);
    CHECK_FALSE(all.zero_hit);
    const ProbabilityEstimate none = mc_event_probability(EventSpec::terminal_exit(g, 1e9), 0.1, 50, 1, s);
    CHECK(none.p_hat == 0.0);
    CHECK(none.zero_hit);
    CHECK(none.eps_log_p == doctest::Approx(0.1 * std::log(1.0 / 50.0)));
    CHECK(none.ci_lo == 0.0);
    CHECK(none.ci_hi > 0.0);
  }

  TEST_CASE("event kinds") {
    const McSetup s = setup_for(ModelSpec{});
    const ExponentialEuler scheme(s.spec, s.config);
    const Trajectory ref = scheme.integrate(s.u0, nullptr, nullptr, 0.0);
    CHECK_FALSE(EventSpec::tube_exit(ref, 1e-9).occurs(ref));
    CHECK(EventSpec::tube_exit(ref, 0.0).occurs(ref));
    CHECK_FALSE(EventSpec::holder_exit(ref, 1e-9, 0.2, 4.0).occurs(ref));
    CHECK(EventSpec::terminal_entry(ref.field(ref.steps()), 0.0).occurs(ref));
    CHECK(EventSpec::whole_space().occurs(ref));
    for (auto k : {EventKind::terminal_ball_exit, EventKind::terminal_ball_entry, EventKind::tube_exit,
                   EventKind::holder_exit, EventKind::whole_space})
      CHECK(parse_event_kind(to_string(k)) == k);
    CHECK_THROWS_AS(parse_event_kind("sideways"), InvalidArgument);
  }

  TEST_CASE("zero tilt reproduces plain Monte Carlo") {
    const McSetup s = setup_for(ModelSpec{});
    const EventSpec ev = EventSpec::terminal_exit(free_endpoint(s), 0.3);
    const ProbabilityEstimate mc = mc_event_probability(ev, 0.1, 400, 9, s);
    const ProbabilityEstimate is = importance_sample(ev, 0.1, ControlPath(kGrid, kCfg.time), 400, 9, s);
    CHECK(mc.hits == is.hits);
    CHECK(mc.p_hat == is.p_hat);
    CHECK(is.mean_weight == 1.0);
  }

  TEST_CASE("estimates are independent of the worker count") {
    McSetup s = setup_for(ModelSpec{});
    const EventSpec ev = EventSpec::terminal_exit(free_endpoint(s), 0.3);
    s.workers = 1;
    const ProbabilityEstimate one = mc_event_probability(ev, 0.1, 64, 2, s);
    s.workers = 4;
    const ProbabilityEstimate four = mc_event_probability(ev, 0.1, 64, 2, s);
    CHECK(one.hits == four.hits);
  }

  TEST_CASE("mean likelihood ratio is one over the whole space") {
    const McSetup s = setup_for(ModelSpec::linear(1.0));
    ControlPath v(kGrid, kCfg.time);
    for (std::size_t m = 0; m < v.steps(); ++m)
      for (int j = 0; j < kGrid.n; ++j) v.at(m)[j] = 1.0 + std::cos(kGrid.point(j));
    const ProbabilityEstimate is = importance_sample(EventSpec::whole_space(), 0.1, v, 10000, 3, s);
    CHECK(std::abs(is.mean_weight - 1.0) <= 3.0 * is.weight_se);
    CHECK(is.p_hat == doctest::Approx(is.mean_weight));
  }

  TEST_CASE("plain and importance-sampled estimates agree on a moderate event") {
    const McSetup s = setup_for(ModelSpec{});
    const GridField g = shifted_centre(s, 0.5);
    const double delta = 0.45;
    const RateCertificate cert =
        minimize_rate(RateProblem{s.u0, s.spec, s.config, TerminalTarget::ball(g, delta)}, OptimizerOptions{});
    const EventSpec ev = EventSpec::terminal_entry(g, delta);
    const ProbabilityEstimate mc = mc_event_probability(ev, 0.1, 2000, 21, s);
    const ProbabilityEstimate is = importance_sample(ev, 0.1, cert.control, 2000, 22, s);
    MESSAGE("moderate: mc " << mc.p_hat << " is " << is.p_hat);
    CHECK(mc.p_hat > 0.05);
    CHECK(mc.p_hat < 0.5);
    CHECK(mc.ci_lo <= is.ci_hi);
    CHECK(is.ci_lo <= mc.ci_hi);
  }

  TEST_CASE("importance sampling reduces variance on a rare event") {
    const McSetup s = setup_for(ModelSpec{});
    const GridField g = shifted_centre(s, 0.5);
    const double delta = 0.42;
    const RateCertificate cert =
        minimize_rate(RateProblem{s.u0, s.spec, s.config, TerminalTarget::ball(g, delta)}, OptimizerOptions{});
    const EventSpec ev = EventSpec::terminal_entry(g, delta);
    const ProbabilityEstimate mc = mc_event_probability(ev, 0.01, 2000, 31, s);
    const ProbabilityEstimate is = importance_sample(ev, 0.01, cert.control, 2000, 32, s);
    MESSAGE("rare: mc " << mc.p_hat << " var " << mc.sample_variance << "; is " << is.p_hat << " var "
                        << is.sample_variance);
    CHECK(mc.hits > 0);
    CHECK(is.hits > 0);
    CHECK(is.sample_variance < mc.sample_variance);
  }

  TEST_CASE("A2 distances vanish without noise coefficient") {
    ModelSpec quiet;
    quiet.sigma = {SigmaKind::constant, 0.0, 1.0};
    const McSetup s = setup_for(quiet);
    const A2Report rep = verify_A2(ControlPath(kGrid, kCfg.time), std::nullopt, {1e-1, 1e-2, 1e-3}, 5, 1, s, 0.2, 4.0);
    for (const auto& r : rep.rows) CHECK(r.distance == 0.0);
  }

  TEST_CASE("A2 distances shrink with the noise") {
    const McSetup s = setup_for(ModelSpec{});
    ControlPath v(kGrid, kCfg.time);
    for (std::size_t m = 0; m < v.steps(); ++m) v.at(m)[3] = 1.0;
    const A2Report rep = verify_A2(v, std::nullopt, {1e-1, 1e-2, 1e-3, 1e-4}, 50, 2, s, 0.2, 4.0);
    for (std::size_t i = 1; i < rep.rows.size(); ++i) CHECK(rep.rows[i].distance < rep.rows[i - 1].distance);
    CHECK(rep.slope == doctest::Approx(0.5).epsilon(0.2));
  }

  TEST_CASE("A1 oscillations") {
    const Grid grid{1, 16};
    const SolverConfig cfg{grid, TimeGrid{0.01, 50}};
    const McSetup s{GridField(grid), ModelSpec{}, cfg, 0};
    const ControlPath v(grid, cfg.time);
    const A1Report same = verify_A1(v, GridField(grid), {1, 4, 16, 64}, 10.0, s, 0.2, 4.0);
    for (const auto& r : same.rows) CHECK(r.distance == 0.0);

    GridField g(grid);
    for (int j = 0; j < grid.n; ++j) g.values[j] = std::cos(grid.point(j));
    const A1Report rep = verify_A1(v, g, {1, 4, 16, 64}, 10.0, s, 0.2, 4.0);
    CHECK(rep.rows.back().distance < rep.rows.front().distance);
    for (const auto& r : rep.rows) CHECK(r.control_norm_sq <= 10.0);
    CHECK_THROWS_AS(verify_A1(v, g, {1.0}, 1e-3, s, 0.2, 4.0), InvalidArgument);
  }

  TEST_CASE("empirical diameter of a bounded control family") {
    const McSetup s = setup_for(ModelSpec{});
    const double N = 2.0;
    std::vector<ControlPath> family;
    for (std::uint64_t i = 0; i < 20; ++i) {
      ControlPath v(kGrid, kCfg.time);
      const CounterStream st(SeedSpec{55, i});
      for (std::size_t k = 0; k < v.data().size(); ++k) v.data()[k] = st.normal(k);
      const double scale = std::sqrt(N / control_norm_sq(v)) * st.uniform(1u << 20);
      for (double& x : v.data()) x *= scale;
      CHECK(in_ball(v, N));
      family.push_back(std::move(v));
    }
    const double d = empirical_diameter(family, s, 0.2, 4.0);
    CHECK(std::isfinite(d));
    CHECK(d > 0.0);
    CHECK(d < 1e3);
  }

  TEST_CASE("scaling study on an almost sure event tends to zero") {
    const McSetup s = setup_for(ModelSpec{});
    const EventSpec ev = EventSpec::terminal_exit(free_endpoint(s), 1e-6);
    const ScalingReport rep = ldp_scaling_study(ev, {1e-1, 1e-2, 1e-3}, {50, 50, 50}, std::nullopt, 4, s);
    for (const auto& r : rep.rows) CHECK(r.neg_eps_log_p == doctest::Approx(0.0).epsilon(1e-12));
    CHECK_THROWS_AS(ldp_scaling_study(ev, {1e-2, 1e-1}, {5, 5}, std::nullopt, 4, s), InvalidArgument);
  }

  TEST_CASE("trend test") {
    const std::vector<double> x{1, 2, 3, 4};
    CHECK(trend_test(x, {0.1, 0.2, 0.3, 0.4}, {0.01, 0.01, 0.01, 0.01}).nondecreasing);
    CHECK_FALSE(trend_test(x, {0.4, 0.3, 0.2, 0.1}, {0.01, 0.01, 0.01, 0.01}).nondecreasing);
    CHECK(trend_test(x, {0.2, 0.19, 0.2, 0.21}, {0.05, 0.05, 0.05, 0.05}).nondecreasing);
  }

  TEST_CASE("binomial and line-fit helpers") {
    const auto ci = stats::wilson(20, 100);
    CHECK(ci.lo < 0.2);
    CHECK(ci.hi > 0.2);
    CHECK(stats::wilson(0, 10).lo == 0.0);
    const std::vector<double> x{1, 2, 3}, y{3, 5, 7};
    const auto fit = stats::ols(x, y);
    CHECK(fit.slope == doctest::Approx(2.0));
    CHECK(fit.intercept == doctest::Approx(1.0));
    CHECK(stats::normal_upper_tail(0.0) == doctest::Approx(0.5));
    CHECK(std::isfinite(stats::log_normal_upper_tail(60.0)));
    CHECK(stats::log_normal_upper_tail(20.0) == doctest::Approx(std::log(stats::normal_upper_tail(20.0))).epsilon(1e-10));
  }
}
