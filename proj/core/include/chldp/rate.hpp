#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "chldp/integrator.hpp"

namespace chldp {

/// Smooth terminal cost Phi(u(T)) with its L^2(D) Riesz gradient.
struct TerminalPenalty {
  std::string name;
  std::function<double(const GridField&)> value;
  std::function<GridField(const GridField&)> gradient;
};

/// Phi(u) = (weight / 2) ||u - g||_2^2.
TerminalPenalty quadratic_penalty(GridField g, double weight);

enum class TargetKind {
  ball,       // reach {||u(T) - g||_2 <= delta}
  ball_exit,  // reach {||u(T) - g||_2 >= delta}
  penalty,    // Laplace form: minimize 1/2 ||v||^2 + Phi(u(T)) / eps_ref
};

struct TerminalTarget {
  TargetKind kind = TargetKind::ball;
  GridField g;
  double delta = 0.0;
  TerminalPenalty penalty;
  double eps_ref = 1.0;

  static TerminalTarget ball(GridField g, double delta);
  static TerminalTarget ball_exit(GridField g, double delta);
  static TerminalTarget penalized(TerminalPenalty penalty, double eps_ref);

  /// Distance to the target set (0 when the endpoint satisfies it; 0 for penalty targets).
  double violation(const GridField& endpoint) const;
};

/// Everything that fixes the discrete control-to-endpoint map.
struct RateProblem {
  GridField u0;
  ModelSpec spec;
  SolverConfig config;
  TerminalTarget target;
};

/// 1/2 ||v||^2_{L^2([0,T] x D)}.
double rate_eval(const ControlPath& v);

/// sup_m ||h(t_m) - R(h, v)(t_m)||_2 with R the discrete Duhamel map of the skeleton.
double admissibility_residual(const Trajectory& h, const ControlPath& v, const GridField& u0, const ModelSpec& spec);

/// J(v) = 1/2 ||v||^2 + terminal term. For ball targets the terminal term is the
/// quadratic penalty (1/(2 mu)) dist^2; `mu` is ignored for penalty targets.
double rate_objective(const RateProblem& problem, const ControlPath& v, double mu);

struct GradientResult {
  double value = 0.0;
  ControlPath gradient;  // Riesz representative under the dt*h*sum inner product
  GridField endpoint;
};

/// Gradient of rate_objective through the discrete adjoint of the exponential-Euler scheme.
GradientResult adjoint_gradient(const RateProblem& problem, const ControlPath& v, double mu);

struct OptimizerOptions {
  double gtol = 1e-6;
  int max_iter = 2000;  // per penalty stage
  std::vector<double> mu_schedule{1.0, 0.1, 0.01, 1e-3};
  int random_starts = 0;  // in addition to the initial control
  double start_scale = 1.0;
  std::uint64_t seed = 0;
  double feasibility_tol = 1e-8;
  bool restore_feasibility = true;
  std::optional<ControlPath> initial;
  unsigned workers = 0;
};

struct OptimizerTrace {
  int iterations = 0;
  double grad_norm = 0.0;
  bool stationary = false;
  double final_mu = 0.0;
  double restore_scale = 1.0;
};

struct RestartRecord {
  int start = 0;
  double cost = 0.0;
  double residual = 0.0;
  int iterations = 0;
  bool stationary = false;
};

/// Upper bound for the discrete rate problem whenever residual <= tolerance.
struct RateCertificate {
  ControlPath control;
  double cost = 0.0;  // 1/2 ||v||^2
  GridField endpoint;
  double residual = 0.0;
  OptimizerTrace trace;
  std::vector<RestartRecord> restarts;

  bool feasible(double tol = 1e-8) const { return residual <= tol; }
};

/// Gradient descent with Armijo backtracking and Barzilai-Borwein trial steps,
/// quadratic-penalty continuation over mu_schedule, then (ball targets) a
/// scaling search along the control to land inside the target set.
/// Best-of-starts: feasible certificates first, then lowest cost.
RateCertificate minimize_rate(const RateProblem& problem, const OptimizerOptions& opts);

}  // namespace chldp
