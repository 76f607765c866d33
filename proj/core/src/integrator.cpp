#include "chldp/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "chldp/norms.hpp"
#include "chldp/spectral.hpp"
#include "chldp/stats.hpp"

namespace chldp {

ExponentialEuler::ExponentialEuler(const ModelSpec& spec, const SolverConfig& config)
    : spec_(spec), config_(config), slope_limit_(std::numeric_limits<double>::infinity()) {
  spec_.validate();
  config_.validate();
  const auto& ops = spectral_ops(config_.grid);
  const double dt = config_.time.dt;
  decay_.resize(ops.size());
  phi_.resize(ops.size());
  for (std::size_t k = 0; k < ops.size(); ++k) {
    const double lam = ops.lambda()[k];
    decay_[k] = std::exp(-lam * dt);
    phi_[k] = lam > 0.0 ? -std::expm1(-lam * dt) / lam : dt;
    const double mu = ops.mu()[k];
    if (mu > 0.0) slope_limit_ = std::min(slope_limit_, (1.0 + decay_[k]) / (phi_[k] * mu));
  }
}

void ExponentialEuler::advance(std::span<double> a, std::span<double> u, std::span<const double> dW,
                               std::span<const double> v, double epsilon, std::size_t step_index) const {
  const auto& ops = spectral_ops(config_.grid);
  const std::size_t n = ops.size();
  const auto mu = ops.mu();

  std::vector<double> grid_tmp(n), fhat(n), chat(n, 0.0), what(n, 0.0), sig(n);
  double max_slope = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < n; ++j) {
    grid_tmp[j] = spec_.f_eval(u[j]);
    sig[j] = spec_.sigma.eval(u[j]);
    max_slope = std::max(max_slope, spec_.f_prime(u[j]));
  }
  if (config_.enforce_step_bound && max_slope > slope_limit_)
    throw SolverAbort("drift slope " + std::to_string(max_slope) + " exceeds the step-size bound " +
                          std::to_string(slope_limit_),
                      step_index);
  ops.forward(grid_tmp, fhat);

  if (!v.empty()) {
    for (std::size_t j = 0; j < n; ++j) grid_tmp[j] = sig[j] * v[j];
    ops.forward(grid_tmp, chat);
  }
  const bool noisy = !dW.empty() && epsilon > 0.0;
  if (noisy) {
    for (std::size_t j = 0; j < n; ++j) grid_tmp[j] = sig[j] * dW[j];
    ops.forward(grid_tmp, what);
    // forward() carries the weight h; point masses do not.
    const double scale = std::sqrt(epsilon) / config_.grid.cell_volume();
    for (std::size_t k = 0; k < n; ++k) what[k] *= scale;
  }

  for (std::size_t k = 0; k < n; ++k) {
    double next = decay_[k] * a[k] + phi_[k] * (chat[k] - mu[k] * fhat[k]);
    if (noisy) next += decay_[k] * what[k];
    a[k] = next;
  }
  ops.inverse(a, u);

  double sup = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    if (!std::isfinite(u[j])) throw SolverAbort("non-finite state", step_index + 1);
    sup = std::max(sup, std::abs(u[j]));
  }
  if (sup > config_.blowup_threshold)
    throw SolverAbort("sup norm " + std::to_string(sup) + " exceeds blow-up threshold", step_index + 1);
}

Trajectory ExponentialEuler::integrate(const GridField& u0, const NoisePath* noise, const ControlPath* control,
                                       double epsilon) const {
  const Grid& grid = config_.grid;
  if (!(u0.grid == grid)) throw InvalidArgument("initial condition lives on a different grid");
  if (noise && (!(noise->grid() == grid) || !(noise->time() == config_.time)))
    throw InvalidArgument("noise path does not match solver grid");
  if (control && (!(control->grid() == grid) || !(control->time() == config_.time)))
    throw InvalidArgument("control does not match solver grid");
  if (!(epsilon >= 0.0)) throw InvalidArgument("noise scale must be nonnegative");

  const auto& ops = spectral_ops(grid);
  Trajectory traj(grid, config_.time);
  std::vector<double> a(grid.size()), u(grid.size());
  ops.forward(u0.values, a);
  ops.inverse(a, u);
  std::copy(u0.values.begin(), u0.values.end(), traj.at(0).begin());
  for (std::size_t m = 0; m < config_.time.steps; ++m) {
    std::span<const double> dW = noise ? noise->at(m) : std::span<const double>{};
    std::span<const double> vm = control ? control->at(m) : std::span<const double>{};
    advance(a, u, dW, vm, epsilon, m);
    std::copy(u.begin(), u.end(), traj.at(m + 1).begin());
  }
  traj.meta.epsilon = epsilon;
  return traj;
}

GridField step(const GridField& state, std::span<const double> dW, std::span<const double> v, double epsilon,
               double dt, const ModelSpec& spec) {
  SolverConfig cfg{state.grid, TimeGrid{dt, 1}};
  const ExponentialEuler scheme(spec, cfg);
  if (!dW.empty() && dW.size() != state.grid.size()) throw InvalidArgument("noise slice does not match state");
  if (!v.empty() && v.size() != state.grid.size()) throw InvalidArgument("control slice does not match state");
  const auto& ops = spectral_ops(state.grid);
  std::vector<double> a(state.grid.size()), u = state.values;
  ops.forward(u, a);
  scheme.advance(a, u, dW, v, epsilon, 0);
  return GridField(state.grid, std::move(u));
}

Trajectory solve_skeleton(const GridField& u0, const ControlPath& v, const ModelSpec& spec,
                          const SolverConfig& config, double tol_mild) {
  for (double x : v.data())
    if (!std::isfinite(x)) throw InvalidArgument("control has non-finite values");
  const ExponentialEuler scheme(spec, config);
  Trajectory traj = scheme.integrate(u0, nullptr, &v, 0.0);
  const double res = mild_residual(traj, u0, &v, nullptr, 0.0, spec);
  if (!(res <= tol_mild))
    throw SolverAbort("mild residual " + std::to_string(res) + " exceeds tolerance", config.time.steps);
  return traj;
}

Trajectory solve_stochastic(const GridField& u0, const NoisePath& w, const ControlPath* v, double epsilon,
                            const ModelSpec& spec, const SolverConfig& config) {
  const ExponentialEuler scheme(spec, config);
  Trajectory traj = scheme.integrate(u0, &w, v, epsilon);
  traj.meta.control_id = v ? "control" : "none";
  return traj;
}

namespace {

// Nonlinear forcing N(u, v) = -mu f^(u) + (sigma(u) v)^ in spectral coordinates.
void forcing(const SpectralOps& ops, const ModelSpec& spec, std::span<const double> u, std::span<const double> v,
             std::span<double> out) {
  const std::size_t n = ops.size();
  std::vector<double> g(n), fhat(n), chat(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) g[j] = spec.f_eval(u[j]);
  ops.forward(g, fhat);
  if (!v.empty()) {
    for (std::size_t j = 0; j < n; ++j) g[j] = spec.sigma.eval(u[j]) * v[j];
    ops.forward(g, chat);
  }
  for (std::size_t k = 0; k < n; ++k) out[k] = chat[k] - ops.mu()[k] * fhat[k];
}

}  // namespace

double mild_residual(const Trajectory& traj, const GridField& u0, const ControlPath* v, const NoisePath* w,
                     double epsilon, const ModelSpec& spec) {
  const Grid& grid = traj.grid();
  const auto& ops = spectral_ops(grid);
  const std::size_t n = grid.size();
  const std::size_t M = traj.steps();
  const double dt = traj.time().dt;
  const auto lambda = ops.lambda();

  std::vector<double> rebuilt(n), a0(n), N(n), g(n), noise_hat(n);
  ops.forward(u0.values, a0);
  for (std::size_t k = 0; k < n; ++k) rebuilt[k] = std::exp(-lambda[k] * dt * static_cast<double>(M)) * a0[k];
  for (std::size_t m = 0; m < M; ++m) {
    forcing(ops, spec, traj.at(m), v ? v->at(m) : std::span<const double>{}, N);
    const bool noisy = w && epsilon > 0.0;
    if (noisy) {
      for (std::size_t j = 0; j < n; ++j) g[j] = spec.sigma.eval(traj.at(m)[j]) * w->at(m)[j];
      ops.forward(g, noise_hat);
    }
    const double lag = dt * static_cast<double>(M - 1 - m);
    const double noise_scale = std::sqrt(epsilon) / grid.cell_volume();
    for (std::size_t k = 0; k < n; ++k) {
      const double lam = lambda[k];
      const double E = std::exp(-lam * dt);
      const double phi = lam > 0.0 ? -std::expm1(-lam * dt) / lam : dt;
      double term = phi * N[k];
      if (noisy) term += E * noise_scale * noise_hat[k];
      rebuilt[k] += std::exp(-lam * lag) * term;
    }
  }
  std::vector<double> end_grid(n);
  ops.inverse(rebuilt, end_grid);
  return lp_distance(grid, end_grid, traj.at(M), 2.0);
}

Trajectory duhamel_map(const Trajectory& h, const GridField& u0, const ControlPath* v, const ModelSpec& spec) {
  const Grid& grid = h.grid();
  if (!(u0.grid == grid)) throw InvalidArgument("initial condition lives on a different grid");
  if (v && (!(v->grid() == grid) || !(v->time() == h.time()))) throw InvalidArgument("control does not match path grid");
  const auto& ops = spectral_ops(grid);
  const std::size_t n = grid.size();
  const double dt = h.time().dt;
  std::vector<double> R(n), N(n), out(n);
  ops.forward(u0.values, R);
  Trajectory map(grid, h.time());
  ops.inverse(R, map.at(0));
  for (std::size_t m = 0; m < h.steps(); ++m) {
    forcing(ops, spec, h.at(m), v ? v->at(m) : std::span<const double>{}, N);
    for (std::size_t k = 0; k < n; ++k) {
      const double lam = ops.lambda()[k];
      const double phi = lam > 0.0 ? -std::expm1(-lam * dt) / lam : dt;
      R[k] = std::exp(-lam * dt) * R[k] + phi * N[k];
    }
    ops.inverse(R, map.at(m + 1));
  }
  return map;
}

double moment_sup(std::span<const Trajectory> replicas, double p, double q) {
  if (replicas.empty()) throw InvalidArgument("moment needs at least one replica");
  const std::size_t points = replicas.front().points();
  double sup = 0.0;
  std::vector<double> samples(replicas.size());
  for (std::size_t m = 0; m < points; ++m) {
    for (std::size_t r = 0; r < replicas.size(); ++r)
      samples[r] = std::pow(lp_norm(replicas[r].grid(), replicas[r].at(m), p), q);
    sup = std::max(sup, stats::mean(samples));
  }
  return sup;
}

}  // namespace chldp
