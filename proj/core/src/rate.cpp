#include "chldp/rate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "chldp/noise.hpp"
#include "chldp/norms.hpp"
#include "chldp/parallel.hpp"
#include "chldp/spectral.hpp"

namespace chldp {

TerminalPenalty quadratic_penalty(GridField g, double weight) {
  TerminalPenalty p;
  p.name = "quadratic";
  p.value = [g, weight](const GridField& u) {
    const double d = lp_distance(u.grid, u.values, g.values, 2.0);
    return 0.5 * weight * d * d;
  };
  p.gradient = [g, weight](const GridField& u) {
    GridField out(u.grid);
    for (std::size_t j = 0; j < out.values.size(); ++j) out.values[j] = weight * (u.values[j] - g.values[j]);
    return out;
  };
  return p;
}

TerminalTarget TerminalTarget::ball(GridField g, double delta) {
  if (!(delta >= 0.0)) throw InvalidArgument("ball radius must be nonnegative");
  TerminalTarget t;
  t.kind = TargetKind::ball;
  t.g = std::move(g);
  t.delta = delta;
  return t;
}

TerminalTarget TerminalTarget::ball_exit(GridField g, double delta) {
  TerminalTarget t = ball(std::move(g), delta);
  t.kind = TargetKind::ball_exit;
  return t;
}

TerminalTarget TerminalTarget::penalized(TerminalPenalty penalty, double eps_ref) {
  if (!(eps_ref > 0.0)) throw InvalidArgument("reference noise scale must be positive");
  if (!penalty.value || !penalty.gradient) throw InvalidArgument("penalty needs a value and a gradient");
  TerminalTarget t;
  t.kind = TargetKind::penalty;
  t.penalty = std::move(penalty);
  t.eps_ref = eps_ref;
  return t;
}

double TerminalTarget::violation(const GridField& endpoint) const {
  if (kind == TargetKind::penalty) return 0.0;
  const double r = lp_distance(endpoint.grid, endpoint.values, g.values, 2.0);
  return kind == TargetKind::ball ? std::max(0.0, r - delta) : std::max(0.0, delta - r);
}

double rate_eval(const ControlPath& v) { return 0.5 * control_norm_sq(v); }

double admissibility_residual(const Trajectory& h, const ControlPath& v, const GridField& u0, const ModelSpec& spec) {
  if (!(v.grid() == h.grid()) || !(v.time() == h.time())) throw InvalidArgument("path and control grids differ");
  const Trajectory rhs = duhamel_map(h, u0, &v, spec);
  double sup = 0.0;
  for (std::size_t m = 0; m < h.points(); ++m) sup = std::max(sup, lp_distance(h.grid(), h.at(m), rhs.at(m), 2.0));
  return sup;
}

namespace {

void check_problem(const RateProblem& problem, const ControlPath& v) {
  if (!(v.grid() == problem.config.grid) || !(v.time() == problem.config.time))
    throw InvalidArgument("control does not match the problem grid");
  if (problem.target.kind != TargetKind::penalty && !(problem.target.g.grid == problem.config.grid))
    throw InvalidArgument("target lives on a different grid");
}

struct Terminal {
  double value = 0.0;
  std::vector<double> grad;  // d/d a_M, spectral
};

Terminal terminal_term(const RateProblem& problem, std::span<const double> end_grid, double mu, bool want_grad) {
  const auto& target = problem.target;
  const Grid& grid = problem.config.grid;
  const auto& ops = spectral_ops(grid);
  const std::size_t n = grid.size();
  Terminal out;
  if (want_grad) out.grad.assign(n, 0.0);

  if (target.kind == TargetKind::penalty) {
    GridField u(grid, std::vector<double>(end_grid.begin(), end_grid.end()));
    out.value = target.penalty.value(u) / target.eps_ref;
    if (want_grad) {
      const GridField g = target.penalty.gradient(u);
      ops.forward(g.values, out.grad);
      for (double& x : out.grad) x /= target.eps_ref;
    }
    return out;
  }

  if (!(mu > 0.0)) throw InvalidArgument("penalty parameter must be positive");
  std::vector<double> diff(n), dhat(n);
  for (std::size_t j = 0; j < n; ++j) diff[j] = end_grid[j] - target.g.values[j];
  const double r = lp_norm(grid, diff, 2.0);
  const double excess = target.kind == TargetKind::ball ? std::max(0.0, r - target.delta)
                                                        : std::max(0.0, target.delta - r);
  out.value = excess * excess / (2.0 * mu);
  if (want_grad && excess > 0.0 && r > 0.0) {
    ops.forward(diff, dhat);
    const double sign = target.kind == TargetKind::ball ? 1.0 : -1.0;
    for (std::size_t k = 0; k < n; ++k) out.grad[k] = sign * excess / (mu * r) * dhat[k];
  }
  return out;
}

}  // namespace

double rate_objective(const RateProblem& problem, const ControlPath& v, double mu) {
  check_problem(problem, v);
  const ExponentialEuler scheme(problem.spec, problem.config);
  const Trajectory traj = scheme.integrate(problem.u0, nullptr, &v, 0.0);
  return rate_eval(v) + terminal_term(problem, traj.at(traj.steps()), mu, false).value;
}

GradientResult adjoint_gradient(const RateProblem& problem, const ControlPath& v, double mu) {
  check_problem(problem, v);
  const ExponentialEuler scheme(problem.spec, problem.config);
  const Trajectory traj = scheme.integrate(problem.u0, nullptr, &v, 0.0);
  const std::size_t M = traj.steps();
  const Terminal term = terminal_term(problem, traj.at(M), mu, true);

  const Grid& grid = problem.config.grid;
  const auto& ops = spectral_ops(grid);
  const std::size_t n = grid.size();
  const double dt = problem.config.time.dt;
  const auto E = scheme.decay();
  const auto phi = scheme.phi();
  const auto mu_k = ops.mu();

  GradientResult out;
  out.value = rate_eval(v) + term.value;
  out.endpoint = traj.field(M);
  out.gradient = v;  // cost part: grad of 1/2 ||v||^2 is v itself

  std::vector<double> lambda = term.grad, psi(n), psi_mu(n), q(n), q_mu(n), s(n), back(n);
  for (std::size_t m = M; m-- > 0;) {
    for (std::size_t k = 0; k < n; ++k) {
      psi[k] = phi[k] * lambda[k];
      psi_mu[k] = -mu_k[k] * psi[k];
    }
    ops.inverse(psi, q);
    ops.inverse(psi_mu, q_mu);
    auto um = traj.at(m);
    auto vm = v.at(m);
    auto gm = out.gradient.at(m);
    for (std::size_t j = 0; j < n; ++j) {
      gm[j] += problem.spec.sigma.eval(um[j]) * q[j] / dt;
      s[j] = q_mu[j] * problem.spec.f_prime(um[j]) + q[j] * problem.spec.sigma.derivative(um[j]) * vm[j];
    }
    ops.forward(s, back);
    for (std::size_t k = 0; k < n; ++k) lambda[k] = E[k] * lambda[k] + back[k];
  }
  return out;
}

namespace {

ControlPath axpy(const ControlPath& x, double a, const ControlPath& y) {
  ControlPath out = x;
  for (std::size_t i = 0; i < out.data().size(); ++i) out.data()[i] += a * y.data()[i];
  return out;
}

ControlPath scaled(const ControlPath& x, double a) {
  ControlPath out = x;
  for (double& e : out.data()) e *= a;
  return out;
}

struct StageResult {
  ControlPath v;
  int iterations = 0;
  double grad_norm = 0.0;
  bool stationary = false;
};

StageResult descend(const RateProblem& problem, ControlPath v, double mu, const OptimizerOptions& opts) {
  StageResult res;
  GradientResult cur = adjoint_gradient(problem, v, mu);
  double step = 1.0;
  ControlPath prev_v, prev_g;
  bool have_prev = false;
  for (int it = 0; it < opts.max_iter; ++it) {
    const double gnorm2 = control_norm_sq(cur.gradient);
    res.grad_norm = std::sqrt(gnorm2);
    if (res.grad_norm < opts.gtol) {
      res.stationary = true;
      break;
    }
    if (have_prev) {
      const ControlPath dv = axpy(v, -1.0, prev_v);
      const ControlPath dg = axpy(cur.gradient, -1.0, prev_g);
      const double sy = control_inner(dv, dg);
      if (sy > 0.0) step = control_norm_sq(dv) / sy;
    }
    double trial_step = step;
    bool accepted = false;
    GradientResult next;
    ControlPath trial;
    for (int bt = 0; bt < 60; ++bt) {
      trial = axpy(v, -trial_step, cur.gradient);
      double val = std::numeric_limits<double>::infinity();
      try {
        val = rate_objective(problem, trial, mu);
      } catch (const SolverAbort&) {
      }
      if (std::isfinite(val) && val <= cur.value - 1e-4 * trial_step * gnorm2) {
        accepted = true;
        break;
      }
      trial_step *= 0.5;
    }
    ++res.iterations;
    if (!accepted) break;
    prev_v = std::move(v);
    prev_g = cur.gradient;
    have_prev = true;
    v = std::move(trial);
    cur = adjoint_gradient(problem, v, mu);
    step = trial_step;
  }
  res.grad_norm = std::sqrt(control_norm_sq(cur.gradient));
  res.stationary = res.grad_norm < opts.gtol;
  res.v = std::move(v);
  return res;
}

GridField endpoint_of(const RateProblem& problem, const ControlPath& v) {
  const ExponentialEuler scheme(problem.spec, problem.config);
  const Trajectory traj = scheme.integrate(problem.u0, nullptr, &v, 0.0);
  return traj.field(traj.steps());
}

// Smallest s >= 1 (to bisection accuracy) with violation(s v) <= tol.
double restore_scale(const RateProblem& problem, const ControlPath& v, double tol) {
  auto violation = [&](double s) {
    try {
      return problem.target.violation(endpoint_of(problem, scaled(v, s)));
    } catch (const SolverAbort&) {
      return std::numeric_limits<double>::infinity();
    }
  };
  if (violation(1.0) <= tol) return 1.0;
  // Ladder s = 1 + d with d doubling from 1e-3, so a small target ball is not stepped over.
  double lo = 1.0, hi = 1.0;
  bool found = false;
  for (double d = 1e-3; d < 1e6; d *= 2.0) {
    hi = 1.0 + d;
    if (violation(hi) <= tol) {
      found = true;
      break;
    }
    lo = hi;
  }
  if (!found) return 1.0;
  for (int i = 0; i < 80 && hi - lo > 1e-15 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (violation(mid) <= tol ? hi : lo) = mid;
  }
  return hi;
}

RateCertificate run_start(const RateProblem& problem, ControlPath v0, const OptimizerOptions& opts) {
  std::vector<double> schedule = opts.mu_schedule;
  if (problem.target.kind == TargetKind::penalty || schedule.empty()) schedule = {1.0};
  RateCertificate cert;
  ControlPath v = std::move(v0);
  for (double mu : schedule) {
    StageResult st = descend(problem, std::move(v), mu, opts);
    v = std::move(st.v);
    cert.trace.iterations += st.iterations;
    cert.trace.grad_norm = st.grad_norm;
    cert.trace.stationary = st.stationary;
    cert.trace.final_mu = mu;
  }
  if (opts.restore_feasibility && problem.target.kind != TargetKind::penalty) {
    cert.trace.restore_scale = restore_scale(problem, v, opts.feasibility_tol);
    if (cert.trace.restore_scale != 1.0) v = scaled(v, cert.trace.restore_scale);
  }
  cert.endpoint = endpoint_of(problem, v);
  cert.residual = problem.target.violation(cert.endpoint);
  cert.cost = rate_eval(v);
  cert.control = std::move(v);
  return cert;
}

}  // namespace

RateCertificate minimize_rate(const RateProblem& problem, const OptimizerOptions& opts) {
  ControlPath first(problem.config.grid, problem.config.time);
  if (opts.initial) {
    check_problem(problem, *opts.initial);
    first = *opts.initial;
  }
  check_problem(problem, first);

  const std::size_t starts = 1 + static_cast<std::size_t>(std::max(0, opts.random_starts));
  std::vector<RateCertificate> certs(starts);
  parallel_for(
      starts,
      [&](std::size_t s) {
        ControlPath v0 = first;
        if (s > 0) {
          const CounterStream stream(SeedSpec{opts.seed, s});
          for (std::size_t i = 0; i < v0.data().size(); ++i) v0.data()[i] = opts.start_scale * stream.normal(i);
        }
        try {
          certs[s] = run_start(problem, std::move(v0), opts);
        } catch (const SolverAbort&) {
          if (s == 0) throw;
          certs[s].control = first;
          certs[s].cost = std::numeric_limits<double>::infinity();
          certs[s].residual = std::numeric_limits<double>::infinity();
        }
      },
      opts.workers);

  std::size_t best = 0;
  auto better = [&](const RateCertificate& a, const RateCertificate& b) {
    const bool fa = a.feasible(opts.feasibility_tol), fb = b.feasible(opts.feasibility_tol);
    if (fa != fb) return fa;
    if (!fa) return a.residual < b.residual;
    return a.cost < b.cost;
  };
  for (std::size_t s = 1; s < starts; ++s)
    if (better(certs[s], certs[best])) best = s;

  RateCertificate out = certs[best];
  for (std::size_t s = 0; s < starts; ++s) {
    out.restarts.push_back({static_cast<int>(s), certs[s].cost, certs[s].residual, certs[s].trace.iterations,
                            certs[s].trace.stationary});
  }
  return out;
}

}  // namespace chldp
