#include "chldp/stats.hpp"

#include <cmath>
#include <numbers>

#include "chldp/error.hpp"

namespace chldp::stats {

double pairwise_sum(std::span<const double> xs) {
  if (xs.size() <= 8) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s;
  }
  const std::size_t half = xs.size() / 2;
  return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

double mean(std::span<const double> xs) {
  if (xs.empty()) return 0.0;
  return pairwise_sum(xs) / static_cast<double>(xs.size());
}

double variance(std::span<const double> xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean(xs);
  std::vector<double> sq(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) sq[i] = (xs[i] - m) * (xs[i] - m);
  return pairwise_sum(sq) / static_cast<double>(xs.size() - 1);
}

Interval wilson(std::size_t hits, std::size_t trials, double z) {
  if (trials == 0) return {0.0, 1.0};
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(hits) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double centre = (p + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  return {hits == 0 ? 0.0 : std::max(0.0, centre - half), hits == trials ? 1.0 : std::min(1.0, centre + half)};
}

LineFit wls(std::span<const double> x, std::span<const double> y, std::span<const double> sigma) {
  if (x.size() != y.size() || x.size() != sigma.size()) throw InvalidArgument("fit inputs differ in length");
  if (x.size() < 2) throw InvalidArgument("line fit needs at least two points");
  double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double w = 1.0 / (sigma[i] * sigma[i]);
    sw += w;
    sx += w * x[i];
    sy += w * y[i];
    sxx += w * x[i] * x[i];
    sxy += w * x[i] * y[i];
  }
  const double det = sw * sxx - sx * sx;
  if (!(std::abs(det) > 0.0)) throw InvalidArgument("degenerate abscissae in line fit");
  LineFit fit;
  fit.slope = (sw * sxy - sx * sy) / det;
  fit.intercept = (sy - fit.slope * sx) / sw;
  fit.slope_se = std::sqrt(sw / det);
  return fit;
}

LineFit ols(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw InvalidArgument("fit inputs differ in length");
  if (x.size() < 2) throw InvalidArgument("line fit needs at least two points");
  const std::vector<double> ones(x.size(), 1.0);
  LineFit fit = wls(x, y, ones);
  if (x.size() > 2) {
    double rss = 0.0, mx = 0.0, sxx = 0.0;
    for (double xi : x) mx += xi;
    mx /= static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double r = y[i] - fit.intercept - fit.slope * x[i];
      rss += r * r;
      sxx += (x[i] - mx) * (x[i] - mx);
    }
    fit.slope_se = std::sqrt(rss / static_cast<double>(x.size() - 2) / sxx);
  } else {
    fit.slope_se = 0.0;
  }
  return fit;
}

LineFit loglog_fit(std::span<const double> x, std::span<const double> y) {
  std::vector<double> lx(x.size()), ly(y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw InvalidArgument("log-log fit needs positive data");
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
  }
  return ols(lx, ly);
}

double normal_upper_tail(double z) { return 0.5 * std::erfc(z / std::numbers::sqrt2); }

double log_normal_upper_tail(double z) {
  if (z < 30.0) return std::log(normal_upper_tail(z));
  // Asymptotic series of the Mills ratio.
  const double z2 = z * z;
  const double series = 1.0 - 1.0 / z2 + 3.0 / (z2 * z2) - 15.0 / (z2 * z2 * z2);
  return -0.5 * z2 - std::log(z * std::sqrt(2.0 * std::numbers::pi)) + std::log(series);
}

}  // namespace chldp::stats
