#pragma once

#include <optional>
#include <span>
#include <vector>

#include "chldp/fields.hpp"
#include "chldp/model.hpp"
#include "chldp/noise.hpp"

namespace chldp {

struct SolverConfig {
  Grid grid;
  TimeGrid time;
  /// Abort when ||u||_inf exceeds this.
  double blowup_threshold = 1e6;
  /// Abort when the explicit drift violates the per-mode amplification bound.
  bool enforce_step_bound = true;

  void validate() const {
    grid.validate();
    time.validate();
  }
};

/// Spectral exponential-Euler scheme for the mild formulation.
///
/// In cosine coordinates one step reads
///   a_k+ = E_k a_k + phi_k [ -mu_k f^_k(u) + (sigma(u) v)^_k ] + E_k sqrt(eps) (sigma(u) dW)~_k
/// with E_k = exp(-lambda_k dt), phi_k = (1 - E_k) / lambda_k (phi_0 = dt).
/// The control transform uses the quadrature weight h; the noise transform
/// treats sigma(u_j) dW_j as point masses, (.)~_k = sum_j e_k(y_j) sigma_j dW_j.
///
/// The drift is explicit. Linearizing it around a state with f'(u) <= F gives
/// per-mode amplification E_k - phi_k mu_k f'; the step is rejected unless
/// phi_k mu_k F <= 1 + E_k for every mode.
class ExponentialEuler {
 public:
  ExponentialEuler(const ModelSpec& spec, const SolverConfig& config);

  const SolverConfig& config() const noexcept { return config_; }
  const ModelSpec& model() const noexcept { return spec_; }
  std::span<const double> decay() const noexcept { return decay_; }
  std::span<const double> phi() const noexcept { return phi_; }
  /// Largest max_j f'(u_j) the step bound admits.
  double drift_slope_limit() const noexcept { return slope_limit_; }

  /// Advances spectral state `a` in place; `u` must hold the grid values of `a`
  /// on entry and holds the new grid values on exit. Empty spans mean "absent".
  void advance(std::span<double> a, std::span<double> u, std::span<const double> dW, std::span<const double> v,
               double epsilon, std::size_t step_index) const;

  /// Integrates from u0. `noise` may be null (skeleton); `control` may be null (v = 0).
  Trajectory integrate(const GridField& u0, const NoisePath* noise, const ControlPath* control, double epsilon) const;

 private:
  ModelSpec spec_;
  SolverConfig config_;
  std::vector<double> decay_;
  std::vector<double> phi_;
  double slope_limit_;
};

/// One step of the scheme in grid coordinates.
GridField step(const GridField& state, std::span<const double> dW, std::span<const double> v, double epsilon,
               double dt, const ModelSpec& spec);

/// Zero-noise controlled equation. Throws SolverAbort on blow-up or when the
/// Duhamel residual of the stored path exceeds `tol_mild`.
Trajectory solve_skeleton(const GridField& u0, const ControlPath& v, const ModelSpec& spec,
                          const SolverConfig& config, double tol_mild = 1e-6);

/// Stochastic (controlled if `v` is given) equation driven by `w`.
Trajectory solve_stochastic(const GridField& u0, const NoisePath& w, const ControlPath* v, double epsilon,
                            const ModelSpec& spec, const SolverConfig& config);

/// L^2 distance between the stored endpoint and the endpoint rebuilt by the
/// discrete Duhamel sum E^M a0 + sum_m E^{M-1-m} [phi N(u_m) + E noise_m]
/// over the stored states.
double mild_residual(const Trajectory& traj, const GridField& u0, const ControlPath* v, const NoisePath* w,
                     double epsilon, const ModelSpec& spec);

/// Discrete Duhamel map of the controlled skeleton applied to a given path h:
/// R_0 = u0, R_{m+1} = E R_m + phi N(h_m, v_m). Returned in grid coordinates.
Trajectory duhamel_map(const Trajectory& h, const GridField& u0, const ControlPath* v, const ModelSpec& spec);

/// sup_m E ||u(t_m)||_p^q over a replica set.
double moment_sup(std::span<const Trajectory> replicas, double p, double q);

}  // namespace chldp
