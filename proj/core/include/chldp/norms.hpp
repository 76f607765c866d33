#pragma once

#include <span>

#include "chldp/fields.hpp"

namespace chldp {

/// (h * sum_j |u_j|^p)^{1/p}, h the cell volume. Rejects p < 1.
double lp_norm(const GridField& g, double p);
double lp_norm(const Grid& grid, std::span<const double> values, double p);
/// L^p norm of a - b without materializing the difference.
double lp_distance(const Grid& grid, std::span<const double> a, std::span<const double> b, double p);

struct HolderNorm {
  double sup_term = 0.0;        // sup_m ||u(t_m)||_p
  double increment_term = 0.0;  // sup_{m != m'} ||u(t_m) - u(t_m')||_p / |t_m - t_m'|^alpha
  bool increment_defined = true;  // false for a single-time trajectory

  double value() const noexcept { return sup_term + increment_term; }
};

/// Holder norm ||u||_{alpha,p} over all pairs of the time grid.
HolderNorm holder_norm(const Trajectory& traj, double alpha, double p);
/// Holder norm of u - w (same grids).
HolderNorm holder_distance(const Trajectory& u, const Trajectory& w, double alpha, double p);

/// sup over 0 < |t - t'| < delta of the alpha'-increment quotient. Rejects delta <= dt.
double holder_modulus(const Trajectory& traj, double alpha, double delta, double p);

/// Cost int_0^T int_D v^2 = dt * h * sum v^2.
double control_norm_sq(const ControlPath& v);
/// Quadrature inner product dt * h * sum a b.
double control_inner(const ControlPath& a, const ControlPath& b);
inline bool in_ball(const ControlPath& v, double N) { return control_norm_sq(v) <= N; }

}  // namespace chldp
