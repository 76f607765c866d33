#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "chldp/integrator.hpp"
#include "chldp/rate.hpp"

namespace chldp {

enum class EventKind {
  terminal_ball_exit,   // ||u(T) - g||_2 >= delta
  terminal_ball_entry,  // ||u(T) - g||_2 <= delta
  tube_exit,            // sup_m ||u(t_m) - u0(t_m)||_2 >= delta
  holder_exit,          // ||u - u0||_{alpha,p} >= delta
  whole_space,          // always
};

std::string to_string(EventKind kind);
EventKind parse_event_kind(const std::string& name);

/// Set whose probability is estimated; a deterministic function of a trajectory.
struct EventSpec {
  EventKind kind = EventKind::terminal_ball_exit;
  GridField g;            // terminal-ball centre
  Trajectory reference;   // u0 path for tube / Holder events
  double delta = 0.0;
  double alpha = 0.2;
  double p = 4.0;

  bool occurs(const Trajectory& u) const;

  static EventSpec terminal_exit(GridField g, double delta);
  static EventSpec terminal_entry(GridField g, double delta);
  static EventSpec tube_exit(Trajectory reference, double delta);
  static EventSpec holder_exit(Trajectory reference, double delta, double alpha, double p);
  static EventSpec whole_space();
};

/// Fixed model, grid and initial condition shared by all replicas.
struct McSetup {
  GridField u0;
  ModelSpec spec;
  SolverConfig config;
  unsigned workers = 0;
};

struct ProbabilityEstimate {
  std::string method;  // "mc" or "is"
  double epsilon = 0.0;
  std::size_t replicas = 0;
  std::size_t hits = 0;
  double p_hat = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  double std_error = 0.0;
  /// eps log p_hat; when no replica hits, eps log(1/R) and zero_hit = true.
  double eps_log_p = 0.0;
  bool zero_hit = false;
  double mean_weight = 1.0;  // IS only: mean likelihood ratio over all replicas
  double weight_se = 0.0;
  double sample_variance = 0.0;  // per-replica variance of the estimator terms
  std::size_t aborted = 0;       // replicas whose integration aborted (counted as hits)
};

/// Plain Monte Carlo with a Wilson 95% interval. Replica r uses SeedSpec{seed, r}.
ProbabilityEstimate mc_event_probability(const EventSpec& event, double epsilon, std::size_t replicas,
                                         std::uint64_t seed, const McSetup& setup);

/// Girsanov importance sampling: dynamics driven by sqrt(eps) W + I(v), each
/// replica reweighted by exp(girsanov_log_weight). Same seeds as plain MC, so
/// v = 0 reproduces mc_event_probability exactly. Normal 95% interval from
/// the weighted sample standard error.
ProbabilityEstimate importance_sample(const EventSpec& event, double epsilon, const ControlPath& v,
                                      std::size_t replicas, std::uint64_t seed, const McSetup& setup);

struct DistanceRow {
  double parameter = 0.0;  // epsilon (A2) or frequency (A1)
  double distance = 0.0;   // mean ||u - u^v||_{alpha,p}
  double std_error = 0.0;
  double control_norm_sq = 0.0;
};

struct A2Report {
  std::vector<DistanceRow> rows;
  double slope = 0.0;  // d log distance / d log eps
  double slope_se = 0.0;
};

/// v_eps = v + sqrt(eps) * perturbation when a perturbation is given, else v_eps = v.
A2Report verify_A2(const ControlPath& v, const std::optional<ControlPath>& perturbation,
                   const std::vector<double>& eps_schedule, std::size_t replicas, std::uint64_t seed,
                   const McSetup& setup, double alpha, double p);

struct A1Report {
  std::vector<DistanceRow> rows;
};

/// v_n(t, x) = v + sin(n t) g(x) sampled at interval midpoints; every v_n must stay in S^N.
A1Report verify_A1(const ControlPath& v, const GridField& g, const std::vector<double>& frequencies, double bound_N,
                   const McSetup& setup, double alpha, double p);

/// Largest pairwise ||u^{v_a} - u^{v_b}||_{alpha,p} over the given controls.
double empirical_diameter(const std::vector<ControlPath>& controls, const McSetup& setup, double alpha, double p);

struct ScalingRow {
  ProbabilityEstimate estimate;
  double neg_eps_log_p = 0.0;  // -eps log p_hat
  double neg_lo = 0.0;         // interval on -eps log p from the CI endpoints
  double neg_hi = 0.0;
  bool bound_only = false;
};

struct ScalingReport {
  std::vector<double> eps_schedule;
  std::vector<ScalingRow> rows;
  double certificate_cost = 0.0;
  double trend_slope = 0.0;  // WLS slope of -eps log p vs log(1/eps)
  double trend_se = 0.0;
  bool nondecreasing = false;  // one-sided 95% trend test plus no significant pairwise drop
  double fitted_limit = 0.0;   // WLS intercept of -eps log p vs eps
  double final_gap_ratio = 0.0;  // -eps log p at the smallest eps over the certificate cost
  std::string label;
};

struct ScalingOptions {
  std::size_t min_hits = 20;  // below this plain MC hands over to importance sampling
  bool force_is = false;
};

ScalingReport ldp_scaling_study(const EventSpec& event, const std::vector<double>& eps_schedule,
                                const std::vector<std::size_t>& replica_schedule,
                                const std::optional<RateCertificate>& certificate, std::uint64_t seed,
                                const McSetup& setup, const ScalingOptions& opts = {});

/// Trend statistics for a series y(x) with standard errors: WLS slope, its
/// standard error, and whether a nondecreasing trend survives a one-sided
/// 95% test (slope and every consecutive difference).
struct TrendTest {
  double slope = 0.0;
  double slope_se = 0.0;
  bool nondecreasing = false;
};
TrendTest trend_test(const std::vector<double>& x, const std::vector<double>& y, const std::vector<double>& se);

}  // namespace chldp
