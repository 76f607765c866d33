#include "chldp/norms.hpp"

#include <algorithm>
#include <cmath>

#include "chldp/stats.hpp"

namespace chldp {
namespace {

void check_p(double p) {
  if (!(p >= 1.0)) throw InvalidArgument("L^p exponent must be at least 1");
}

// sum_j |a_j - b_j|^p with fast paths for the exponents used by default.
double power_sum(std::span<const double> a, std::span<const double> b, double p) {
  double s = 0.0;
  if (p == 2.0) {
    for (std::size_t j = 0; j < a.size(); ++j) {
      const double d = a[j] - b[j];
      s += d * d;
    }
  } else if (p == 4.0) {
    for (std::size_t j = 0; j < a.size(); ++j) {
      const double d = a[j] - b[j];
      const double d2 = d * d;
      s += d2 * d2;
    }
  } else {
    for (std::size_t j = 0; j < a.size(); ++j) s += std::pow(std::abs(a[j] - b[j]), p);
  }
  return s;
}

double root(double sum, double h, double p) {
  const double x = h * sum;
  if (p == 2.0) return std::sqrt(x);
  if (p == 4.0) return std::sqrt(std::sqrt(x));
  return std::pow(x, 1.0 / p);
}

// Increment quotient sup over lags 1..max_lag.
double increment_sup(const Trajectory& u, double alpha, double p, std::size_t max_lag) {
  const double h = u.grid().cell_volume();
  double best = 0.0;
  for (std::size_t lag = 1; lag <= max_lag; ++lag) {
    const double denom = std::pow(u.time().dt * static_cast<double>(lag), alpha);
    double lag_best = 0.0;
    for (std::size_t m = 0; m + lag < u.points(); ++m) lag_best = std::max(lag_best, power_sum(u.at(m + lag), u.at(m), p));
    best = std::max(best, root(lag_best, h, p) / denom);
  }
  return best;
}

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("Holder exponent must lie in (0, 1)");
}

}  // namespace

double lp_norm(const Grid& grid, std::span<const double> values, double p) {
  check_p(p);
  if (values.size() != grid.size()) throw InvalidArgument("field length does not match grid");
  double s = 0.0;
  if (p == 2.0 || p == 4.0) {
    std::vector<double> zero(values.size(), 0.0);
    s = power_sum(values, zero, p);
  } else {
    for (double x : values) s += std::pow(std::abs(x), p);
  }
  return root(s, grid.cell_volume(), p);
}

double lp_norm(const GridField& g, double p) { return lp_norm(g.grid, g.values, p); }

double lp_distance(const Grid& grid, std::span<const double> a, std::span<const double> b, double p) {
  check_p(p);
  if (a.size() != grid.size() || b.size() != grid.size()) throw InvalidArgument("field length does not match grid");
  return root(power_sum(a, b, p), grid.cell_volume(), p);
}

HolderNorm holder_norm(const Trajectory& traj, double alpha, double p) {
  check_alpha(alpha);
  check_p(p);
  HolderNorm out;
  for (std::size_t m = 0; m < traj.points(); ++m) out.sup_term = std::max(out.sup_term, lp_norm(traj.grid(), traj.at(m), p));
  if (traj.points() < 2) {
    out.increment_defined = false;
    return out;
  }
  out.increment_term = increment_sup(traj, alpha, p, traj.steps());
  return out;
}

HolderNorm holder_distance(const Trajectory& u, const Trajectory& w, double alpha, double p) {
  if (!(u.grid() == w.grid()) || !(u.time() == w.time())) throw InvalidArgument("trajectories live on different grids");
  Trajectory diff(u.grid(), u.time());
  for (std::size_t m = 0; m < u.points(); ++m) {
    auto a = u.at(m);
    auto b = w.at(m);
    auto d = diff.at(m);
    for (std::size_t j = 0; j < d.size(); ++j) d[j] = a[j] - b[j];
  }
  return holder_norm(diff, alpha, p);
}

double holder_modulus(const Trajectory& traj, double alpha, double delta, double p) {
  check_alpha(alpha);
  check_p(p);
  const double dt = traj.time().dt;
  if (!(delta > dt)) throw InvalidArgument("modulus window must exceed the time step");
  // Admissible lags satisfy lag * dt < delta.
  auto max_lag = static_cast<std::size_t>(std::ceil(delta / dt)) - 1;
  while (max_lag > 0 && static_cast<double>(max_lag) * dt >= delta) --max_lag;
  max_lag = std::min(max_lag, traj.steps());
  if (max_lag == 0) throw InvalidArgument("modulus window admits no time pairs");
  return increment_sup(traj, alpha, p, max_lag);
}

double control_inner(const ControlPath& a, const ControlPath& b) {
  if (!same_shape(a, b)) throw InvalidArgument("controls live on different grids");
  std::vector<double> prod(a.data().size());
  for (std::size_t i = 0; i < prod.size(); ++i) prod[i] = a.data()[i] * b.data()[i];
  return a.time().dt * a.grid().cell_volume() * stats::pairwise_sum(prod);
}

double control_norm_sq(const ControlPath& v) { return control_inner(v, v); }

}  // namespace chldp
