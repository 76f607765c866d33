#include "chldp/ldp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "chldp/noise.hpp"
#include "chldp/norms.hpp"
#include "chldp/parallel.hpp"
#include "chldp/stats.hpp"

namespace chldp {

std::string to_string(EventKind kind) {
  switch (kind) {
    case EventKind::terminal_ball_exit:
      return "terminal_ball_exit";
    case EventKind::terminal_ball_entry:
      return "terminal_ball_entry";
    case EventKind::tube_exit:
      return "tube_exit";
    case EventKind::holder_exit:
      return "holder_exit";
    case EventKind::whole_space:
      return "whole_space";
  }
  return "unknown";
}

EventKind parse_event_kind(const std::string& name) {
  for (auto k : {EventKind::terminal_ball_exit, EventKind::terminal_ball_entry, EventKind::tube_exit,
                 EventKind::holder_exit, EventKind::whole_space})
    if (to_string(k) == name) return k;
  throw InvalidArgument("unknown event kind '" + name + "'");
}

bool EventSpec::occurs(const Trajectory& u) const {
  switch (kind) {
    case EventKind::whole_space:
      return true;
    case EventKind::terminal_ball_exit:
    case EventKind::terminal_ball_entry: {
      const double r = lp_distance(u.grid(), u.at(u.steps()), g.values, 2.0);
      return kind == EventKind::terminal_ball_exit ? r >= delta : r <= delta;
    }
    case EventKind::tube_exit: {
      double sup = 0.0;
      for (std::size_t m = 0; m < u.points(); ++m)
        sup = std::max(sup, lp_distance(u.grid(), u.at(m), reference.at(m), 2.0));
      return sup >= delta;
    }
    case EventKind::holder_exit:
      return holder_distance(u, reference, alpha, p).value() >= delta;
  }
  return false;
}

EventSpec EventSpec::terminal_exit(GridField g, double delta) {
  EventSpec e;
  e.kind = EventKind::terminal_ball_exit;
  e.g = std::move(g);
  e.delta = delta;
  return e;
}

EventSpec EventSpec::terminal_entry(GridField g, double delta) {
  EventSpec e = terminal_exit(std::move(g), delta);
  e.kind = EventKind::terminal_ball_entry;
  return e;
}

EventSpec EventSpec::tube_exit(Trajectory reference, double delta) {
  EventSpec e;
  e.kind = EventKind::tube_exit;
  e.reference = std::move(reference);
  e.delta = delta;
  return e;
}

EventSpec EventSpec::holder_exit(Trajectory reference, double delta, double alpha, double p) {
  EventSpec e = tube_exit(std::move(reference), delta);
  e.kind = EventKind::holder_exit;
  e.alpha = alpha;
  e.p = p;
  return e;
}

EventSpec EventSpec::whole_space() {
  EventSpec e;
  e.kind = EventKind::whole_space;
  return e;
}

namespace {

struct ReplicaOutcome {
  bool hit = false;
  bool aborted = false;
  double log_weight = 0.0;
};

// One replica: cell increments sqrt(eps) dW + dt h v drive the scheme at unit noise scale.
ReplicaOutcome run_replica(const EventSpec& event, double epsilon, const ControlPath* v, std::uint64_t seed,
                           std::size_t r, const McSetup& setup, const ExponentialEuler& scheme) {
  ReplicaOutcome out;
  const NoisePath w = sample_sheet(setup.config.grid, setup.config.time, SeedSpec{seed, r});
  NoisePath drive(w.grid(), w.time());
  const double root_eps = std::sqrt(epsilon);
  if (v) {
    drive = shift_increments(w, *v, epsilon);
    out.log_weight = girsanov_log_weight(w, *v, epsilon);
  } else {
    for (std::size_t i = 0; i < drive.data().size(); ++i) drive.data()[i] = root_eps * w.data()[i];
  }
  try {
    const Trajectory traj = scheme.integrate(setup.u0, &drive, nullptr, 1.0);
    out.hit = event.occurs(traj);
  } catch (const SolverAbort&) {
    out.aborted = true;
    out.hit = event.kind != EventKind::terminal_ball_entry;
  }
  return out;
}

ProbabilityEstimate estimate(const EventSpec& event, double epsilon, const ControlPath* v, std::size_t replicas,
                             std::uint64_t seed, const McSetup& setup) {
  if (replicas == 0) throw InvalidArgument("need at least one replica");
  if (!(epsilon > 0.0)) throw InvalidArgument("noise scale must be positive");
  const ExponentialEuler scheme(setup.spec, setup.config);
  std::vector<ReplicaOutcome> outcomes(replicas);
  parallel_for(
      replicas, [&](std::size_t r) { outcomes[r] = run_replica(event, epsilon, v, seed, r, setup, scheme); },
      setup.workers);

  ProbabilityEstimate est;
  est.method = v ? "is" : "mc";
  est.epsilon = epsilon;
  est.replicas = replicas;
  const double R = static_cast<double>(replicas);
  for (const auto& o : outcomes) {
    est.hits += o.hit ? 1 : 0;
    est.aborted += o.aborted ? 1 : 0;
  }

  if (!v) {
    est.p_hat = static_cast<double>(est.hits) / R;
    const auto ci = stats::wilson(est.hits, replicas);
    est.ci_lo = ci.lo;
    est.ci_hi = ci.hi;
    est.sample_variance = replicas > 1 ? est.p_hat * (1.0 - est.p_hat) * R / (R - 1.0) : 0.0;
    est.std_error = std::sqrt(est.p_hat * (1.0 - est.p_hat) / R);
  } else {
    // Log-sum-exp: scale every term by exp(-shift) before summing.
    double shift = -std::numeric_limits<double>::infinity();
    for (const auto& o : outcomes) shift = std::max(shift, o.log_weight);
    std::vector<double> weights(replicas), terms(replicas);
    for (std::size_t r = 0; r < replicas; ++r) {
      weights[r] = std::exp(outcomes[r].log_weight - shift);
      terms[r] = outcomes[r].hit ? weights[r] : 0.0;
    }
    const double scale = std::exp(shift);
    const double mean_term = stats::mean(terms);
    const double var_term = stats::variance(terms);
    est.p_hat = scale * mean_term;
    est.sample_variance = scale * scale * var_term;
    est.std_error = scale * std::sqrt(var_term / R);
    est.mean_weight = scale * stats::mean(weights);
    est.weight_se = scale * std::sqrt(stats::variance(weights) / R);
    constexpr double z = 1.959963984540054;
    est.ci_lo = std::max(0.0, est.p_hat - z * est.std_error);
    est.ci_hi = est.p_hat + z * est.std_error;
  }

  if (est.hits == 0 || !(est.p_hat > 0.0)) {
    est.zero_hit = true;
    est.eps_log_p = epsilon * std::log(1.0 / R);
  } else {
    est.eps_log_p = epsilon * std::log(est.p_hat);
  }
  return est;
}

}  // namespace

ProbabilityEstimate mc_event_probability(const EventSpec& event, double epsilon, std::size_t replicas,
                                         std::uint64_t seed, const McSetup& setup) {
  return estimate(event, epsilon, nullptr, replicas, seed, setup);
}

ProbabilityEstimate importance_sample(const EventSpec& event, double epsilon, const ControlPath& v,
                                      std::size_t replicas, std::uint64_t seed, const McSetup& setup) {
  if (!(v.grid() == setup.config.grid) || !(v.time() == setup.config.time))
    throw InvalidArgument("tilt control does not match solver grid");
  return estimate(event, epsilon, &v, replicas, seed, setup);
}

A2Report verify_A2(const ControlPath& v, const std::optional<ControlPath>& perturbation,
                   const std::vector<double>& eps_schedule, std::size_t replicas, std::uint64_t seed,
                   const McSetup& setup, double alpha, double p) {
  if (eps_schedule.size() < 3) throw InvalidArgument("A2 check needs at least three noise scales");
  if (replicas == 0) throw InvalidArgument("need at least one replica");
  const ExponentialEuler scheme(setup.spec, setup.config);
  const Trajectory skeleton = scheme.integrate(setup.u0, nullptr, &v, 0.0);

  A2Report rep;
  for (std::size_t e = 0; e < eps_schedule.size(); ++e) {
    const double eps = eps_schedule[e];
    if (!(eps > 0.0)) throw InvalidArgument("noise scales must be positive");
    ControlPath v_eps = v;
    if (perturbation) {
      if (!same_shape(*perturbation, v)) throw InvalidArgument("perturbation does not match control grid");
      for (std::size_t i = 0; i < v_eps.data().size(); ++i) v_eps.data()[i] += std::sqrt(eps) * perturbation->data()[i];
    }
    const std::uint64_t master = derive_master(seed, e);
    std::vector<double> dist(replicas);
    parallel_for(
        replicas,
        [&](std::size_t r) {
          const NoisePath w = sample_sheet(setup.config.grid, setup.config.time, SeedSpec{master, r});
          const Trajectory u = scheme.integrate(setup.u0, &w, &v_eps, eps);
          dist[r] = holder_distance(u, skeleton, alpha, p).value();
        },
        setup.workers);
    DistanceRow row;
    row.parameter = eps;
    row.distance = stats::mean(dist);
    row.std_error = std::sqrt(stats::variance(dist) / static_cast<double>(replicas));
    row.control_norm_sq = control_norm_sq(v_eps);
    rep.rows.push_back(row);
  }
  std::vector<double> xs, ys;
  for (const auto& row : rep.rows) {
    if (row.distance > 0.0) {
      xs.push_back(row.parameter);
      ys.push_back(row.distance);
    }
  }
  if (xs.size() >= 2) {
    const auto fit = stats::loglog_fit(xs, ys);
    rep.slope = fit.slope;
    rep.slope_se = fit.slope_se;
  }
  return rep;
}

A1Report verify_A1(const ControlPath& v, const GridField& g, const std::vector<double>& frequencies, double bound_N,
                   const McSetup& setup, double alpha, double p) {
  if (!(g.grid == v.grid())) throw InvalidArgument("oscillation profile does not match control grid");
  const ExponentialEuler scheme(setup.spec, setup.config);
  const Trajectory base = scheme.integrate(setup.u0, nullptr, &v, 0.0);
  A1Report rep;
  for (double freq : frequencies) {
    ControlPath vn = v;
    const double dt = v.time().dt;
    for (std::size_t m = 0; m < vn.steps(); ++m) {
      const double s = std::sin(freq * (static_cast<double>(m) + 0.5) * dt);
      auto row = vn.at(m);
      for (std::size_t j = 0; j < row.size(); ++j) row[j] += s * g.values[j];
    }
    DistanceRow r;
    r.parameter = freq;
    r.control_norm_sq = control_norm_sq(vn);
    if (r.control_norm_sq > bound_N)
      throw InvalidArgument("oscillating control leaves S^N at frequency " + std::to_string(freq));
    const Trajectory u = scheme.integrate(setup.u0, nullptr, &vn, 0.0);
    r.distance = holder_distance(u, base, alpha, p).value();
    rep.rows.push_back(r);
  }
  return rep;
}

double empirical_diameter(const std::vector<ControlPath>& controls, const McSetup& setup, double alpha, double p) {
  const ExponentialEuler scheme(setup.spec, setup.config);
  std::vector<Trajectory> paths(controls.size());
  parallel_for(
      controls.size(), [&](std::size_t i) { paths[i] = scheme.integrate(setup.u0, nullptr, &controls[i], 0.0); },
      setup.workers);
  double diam = 0.0;
  for (std::size_t a = 0; a < paths.size(); ++a)
    for (std::size_t b = a + 1; b < paths.size(); ++b)
      diam = std::max(diam, holder_distance(paths[a], paths[b], alpha, p).value());
  return diam;
}

TrendTest trend_test(const std::vector<double>& x, const std::vector<double>& y, const std::vector<double>& se) {
  constexpr double z = 1.6448536269514722;  // one-sided 95%
  TrendTest t;
  std::vector<double> sig(se.size());
  // Floor on the standard error keeps exact (zero-variance) rows from dominating.
  for (std::size_t i = 0; i < se.size(); ++i) sig[i] = std::max(se[i], 1e-12);
  if (x.size() >= 2) {
    const auto fit = stats::wls(x, y, sig);
    t.slope = fit.slope;
    t.slope_se = fit.slope_se;
  }
  bool ok = t.slope + z * t.slope_se >= 0.0;
  for (std::size_t i = 1; i < y.size(); ++i) {
    const double drop = y[i] - y[i - 1];
    if (drop < -z * std::hypot(sig[i], sig[i - 1])) ok = false;
  }
  t.nondecreasing = ok;
  return t;
}

ScalingReport ldp_scaling_study(const EventSpec& event, const std::vector<double>& eps_schedule,
                                const std::vector<std::size_t>& replica_schedule,
                                const std::optional<RateCertificate>& certificate, std::uint64_t seed,
                                const McSetup& setup, const ScalingOptions& opts) {
  if (eps_schedule.empty()) throw InvalidArgument("scaling study needs a noise-scale schedule");
  if (replica_schedule.size() != eps_schedule.size())
    throw InvalidArgument("replica schedule must match the noise-scale schedule");
  for (std::size_t i = 1; i < eps_schedule.size(); ++i)
    if (!(eps_schedule[i] < eps_schedule[i - 1])) throw InvalidArgument("noise-scale schedule must strictly decrease");

  ScalingReport rep;
  rep.eps_schedule = eps_schedule;
  rep.certificate_cost = certificate ? certificate->cost : std::numeric_limits<double>::quiet_NaN();
  rep.label =
      "desk-scale, one-sided: the certificate is an upper bound of the discrete rate; finite-eps Monte Carlo is biased";

  for (std::size_t i = 0; i < eps_schedule.size(); ++i) {
    const double eps = eps_schedule[i];
    const std::uint64_t master = derive_master(seed, i);
    ProbabilityEstimate est;
    if (!opts.force_is) est = mc_event_probability(event, eps, replica_schedule[i], master, setup);
    if ((opts.force_is || est.hits < opts.min_hits) && certificate)
      est = importance_sample(event, eps, certificate->control, replica_schedule[i], master, setup);
    ScalingRow row;
    row.estimate = est;
    row.bound_only = est.zero_hit;
    row.neg_eps_log_p = -est.eps_log_p;
    row.neg_lo = est.ci_hi > 0.0 ? -eps * std::log(est.ci_hi) : 0.0;
    row.neg_hi = est.ci_lo > 0.0 ? -eps * std::log(est.ci_lo) : std::numeric_limits<double>::infinity();
    rep.rows.push_back(row);
  }

  std::vector<double> x, y, se, e;
  for (const auto& row : rep.rows) {
    if (row.bound_only) continue;
    x.push_back(std::log(1.0 / row.estimate.epsilon));
    e.push_back(row.estimate.epsilon);
    y.push_back(row.neg_eps_log_p);
    // Delta method: sd(-eps log p) = eps * se(p) / p.
    se.push_back(row.estimate.epsilon * row.estimate.std_error / row.estimate.p_hat);
  }
  if (!y.empty()) {
    const TrendTest t = trend_test(x, y, se);
    rep.trend_slope = t.slope;
    rep.trend_se = t.slope_se;
    rep.nondecreasing = t.nondecreasing;
    std::vector<double> sig(se);
    for (double& s : sig) s = std::max(s, 1e-12);
    rep.fitted_limit = y.size() >= 2 ? stats::wls(e, y, sig).intercept : y.back();
    if (certificate && certificate->cost > 0.0) rep.final_gap_ratio = y.back() / certificate->cost;
  }
  return rep;
}

}  // namespace chldp
