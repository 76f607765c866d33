#include "chldp/decomposition.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "chldp/norms.hpp"
#include "chldp/spectral.hpp"

namespace chldp {

JDecomposition j_decomposition(const Trajectory& u_ctrl, const Trajectory& u_skel, const NoisePath& w,
                               const ControlPath& v_eps, const ControlPath& v, double epsilon,
                               const ModelSpec& spec, double p) {
  const Grid& grid = u_ctrl.grid();
  const TimeGrid& time = u_ctrl.time();
  if (!(u_skel.grid() == grid) || !(u_skel.time() == time) || !(w.grid() == grid) || !(w.time() == time) ||
      !(v_eps.grid() == grid) || !(v_eps.time() == time) || !(v.grid() == grid) || !(v.time() == time))
    throw InvalidArgument("decomposition inputs do not share one grid and time step");
  if (!(epsilon >= 0.0)) throw InvalidArgument("noise scale must be nonnegative");

  const auto& ops = spectral_ops(grid);
  const std::size_t n = grid.size();
  const double dt = time.dt;
  std::vector<double> E(n), phi(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double lam = ops.lambda()[k];
    E[k] = std::exp(-lam * dt);
    phi[k] = lam > 0.0 ? -std::expm1(-lam * dt) / lam : dt;
  }

  std::vector<double> J1(n, 0.0), J2(n, 0.0), J3(n, 0.0), J4(n, 0.0);
  std::vector<double> g(n), t1(n), t2(n), t3(n), t4(n);
  std::vector<double> grid_sum(n), grid_y(n), grid_j(n);
  JDecomposition out;
  const std::size_t M = time.steps;
  auto record = [&](std::size_t m) {
    for (std::size_t j = 0; j < n; ++j) grid_y[j] = u_ctrl.at(m)[j] - u_skel.at(m)[j];
    std::fill(grid_sum.begin(), grid_sum.end(), 0.0);
    const std::array<std::pair<const std::vector<double>*, std::vector<double>*>, 4> parts{
        {{&J1, &out.j1}, {&J2, &out.j2}, {&J3, &out.j3}, {&J4, &out.j4}}};
    for (auto [J, series] : parts) {
      ops.inverse(*J, grid_j);
      series->push_back(lp_norm(grid, grid_j, p));
      for (std::size_t j = 0; j < n; ++j) grid_sum[j] += grid_j[j];
    }
    out.y.push_back(lp_norm(grid, grid_y, p));
    out.recombination_residual = std::max(out.recombination_residual, lp_distance(grid, grid_y, grid_sum, p));
  };

  record(0);
  const double noise_scale = std::sqrt(epsilon) / grid.cell_volume();
  for (std::size_t m = 0; m < M; ++m) {
    auto ue = u_ctrl.at(m);
    auto us = u_skel.at(m);
    // J1
    for (std::size_t j = 0; j < n; ++j) g[j] = spec.sigma.eval(ue[j]) * w.at(m)[j];
    ops.forward(g, t1);
    // J2
    for (std::size_t j = 0; j < n; ++j) g[j] = spec.f_eval(ue[j]) - spec.f_eval(us[j]);
    ops.forward(g, t2);
    // J3
    for (std::size_t j = 0; j < n; ++j) g[j] = spec.sigma.eval(ue[j]) * (v_eps.at(m)[j] - v.at(m)[j]);
    ops.forward(g, t3);
    // J4
    for (std::size_t j = 0; j < n; ++j) g[j] = (spec.sigma.eval(ue[j]) - spec.sigma.eval(us[j])) * v.at(m)[j];
    ops.forward(g, t4);
    for (std::size_t k = 0; k < n; ++k) {
      J1[k] = E[k] * J1[k] + (epsilon > 0.0 ? E[k] * noise_scale * t1[k] : 0.0);
      J2[k] = E[k] * J2[k] - phi[k] * ops.mu()[k] * t2[k];
      J3[k] = E[k] * J3[k] + phi[k] * t3[k];
      J4[k] = E[k] * J4[k] + phi[k] * t4[k];
    }
    record(m + 1);
  }
  return out;
}

}  // namespace chldp
