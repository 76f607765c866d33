#include "chldp/green_increments.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "chldp/error.hpp"
#include "chldp/spectral.hpp"
#include "chldp/stats.hpp"

namespace chldp {
namespace {

void check_args(int K, int intervals) {
  if (K < 0) throw InvalidArgument("truncation must be nonnegative");
  if (intervals < 1) throw InvalidArgument("quadrature needs at least one interval");
}

// Trapezoid rule of r -> sum_k w_k * kernel(lambda_k, r) on the graded mesh over [s, t].
double graded_trapezoid(double s, double t, int intervals, const std::function<double(double)>& integrand) {
  if (t <= s) return 0.0;
  const double len = t - s;
  double prev_r = s;
  double prev_f = integrand(s);
  double acc = 0.0;
  for (int i = 1; i <= intervals; ++i) {
    const double q = static_cast<double>(i) / intervals;
    const double r = s + len * q * q * q * q;
    const double f = integrand(r);
    acc += 0.5 * (f + prev_f) * (r - prev_r);
    prev_r = r;
    prev_f = f;
  }
  return acc;
}

double quartic(int k) { return static_cast<double>(k) * k * k * k; }

}  // namespace

double green_space_increment(double t, double y, double z, int K, int intervals) {
  check_args(K, intervals);
  if (t < 0.0) throw InvalidArgument("horizon must be nonnegative");
  std::vector<double> w(static_cast<std::size_t>(K) + 1);
  for (int k = 0; k <= K; ++k) {
    const double d = cosine_mode(k, y) - cosine_mode(k, z);
    w[k] = d * d;
  }
  return graded_trapezoid(0.0, t, intervals, [&](double r) {
    double s = 0.0;
    for (int k = K; k >= 0; --k) s += w[k] * std::exp(-2.0 * quartic(k) * r);
    return s;
  });
}

double green_time_increment(double t, double h, double y, int K, int intervals) {
  check_args(K, intervals);
  if (t < 0.0 || h < 0.0) throw InvalidArgument("horizon and increment must be nonnegative");
  std::vector<double> w(static_cast<std::size_t>(K) + 1);
  for (int k = 0; k <= K; ++k) {
    const double e = cosine_mode(k, y);
    const double d = 1.0 - std::exp(-quartic(k) * h);
    w[k] = e * e * d * d;
  }
  return graded_trapezoid(0.0, t, intervals, [&](double r) {
    double s = 0.0;
    for (int k = K; k >= 0; --k) s += w[k] * std::exp(-2.0 * quartic(k) * r);
    return s;
  });
}

double green_square_norm(double s, double t, double y, int K, int intervals) {
  check_args(K, intervals);
  if (s < 0.0 || t < s) throw InvalidArgument("square-norm integral needs 0 <= s <= t");
  std::vector<double> w(static_cast<std::size_t>(K) + 1);
  for (int k = 0; k <= K; ++k) {
    const double e = cosine_mode(k, y);
    w[k] = e * e;
  }
  return graded_trapezoid(s, t, intervals, [&](double r) {
    double acc = 0.0;
    for (int k = K; k >= 0; --k) acc += w[k] * std::exp(-2.0 * quartic(k) * r);
    return acc;
  });
}

namespace {

ExponentFit fit_family(const std::vector<double>& increments, const std::vector<double>& points,
                       const std::function<double(double, double)>& integral) {
  if (increments.size() < 3) throw InvalidArgument("exponent fit needs at least three probe increments");
  if (points.empty()) throw InvalidArgument("exponent fit needs at least one base point");
  ExponentFit fit;
  fit.increments = increments;
  for (double inc : increments) {
    double sup = 0.0;
    for (double y : points) sup = std::max(sup, integral(inc, y));
    fit.integrals.push_back(sup);
  }
  fit.exponent = stats::loglog_fit(fit.increments, fit.integrals).slope;
  for (std::size_t i = 0; i < increments.size(); ++i)
    fit.constant = std::max(fit.constant, fit.integrals[i] / std::pow(increments[i], fit.exponent));
  return fit;
}

}  // namespace

GreenIncrementReport check_green_increments(const GreenIncrementOptions& opts) {
  const int K = opts.truncation;
  const int N = opts.quadrature_intervals;
  GreenIncrementReport rep;
  rep.space = fit_family(opts.space_increments, opts.points, [&](double dy, double y) {
    // Keep both points inside D.
    const double z = y + dy <= 3.141592653589793 ? y + dy : y - dy;
    return green_space_increment(opts.horizon, y, z, K, N);
  });
  rep.time = fit_family(opts.time_increments, opts.points,
                        [&](double h, double y) { return green_time_increment(opts.horizon, h, y, K, N); });
  rep.square_norm = fit_family(opts.time_increments, opts.points,
                               [&](double h, double y) { return green_square_norm(0.0, h, y, K, N); });
  return rep;
}

}  // namespace chldp
