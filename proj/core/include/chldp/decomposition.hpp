#pragma once

#include <vector>

#include "chldp/integrator.hpp"

namespace chldp {

/// Split of Y = u^{eps, v_eps} - u^v into four Duhamel sums, each advanced
/// with the same weights as the scheme:
///   J1  stochastic convolution of sigma(u^{eps,v_eps}) dW
///   J2  -Delta-weighted difference f(u^{eps,v_eps}) - f(u^v)
///   J3  sigma(u^{eps,v_eps}) (v_eps - v)
///   J4  (sigma(u^{eps,v_eps}) - sigma(u^v)) v
struct JDecomposition {
  std::vector<double> j1, j2, j3, j4;  // ||J_i(t_m)||_p, m = 0..M
  std::vector<double> y;               // ||Y(t_m)||_p
  double recombination_residual = 0.0; // sup_m ||Y - sum J_i||_p
};

JDecomposition j_decomposition(const Trajectory& u_ctrl, const Trajectory& u_skel, const NoisePath& w,
                               const ControlPath& v_eps, const ControlPath& v, double epsilon,
                               const ModelSpec& spec, double p = 4.0);

}  // namespace chldp
