#pragma once

#include <span>
#include <vector>

namespace chldp::stats {

/// Pairwise (cascade) summation; result depends only on the input order.
double pairwise_sum(std::span<const double> xs);

double mean(std::span<const double> xs);
/// Unbiased sample variance; 0 for fewer than two samples.
double variance(std::span<const double> xs);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Wilson score interval for a binomial proportion at normal quantile z.
Interval wilson(std::size_t hits, std::size_t trials, double z = 1.959963984540054);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;  // 0 when the fit has no residual degrees of freedom
};

/// Ordinary least squares y = intercept + slope * x.
LineFit ols(std::span<const double> x, std::span<const double> y);

/// Weighted least squares with weights 1/sigma_i^2.
LineFit wls(std::span<const double> x, std::span<const double> y, std::span<const double> sigma);

/// OLS on (log x, log y); inputs must be strictly positive.
LineFit loglog_fit(std::span<const double> x, std::span<const double> y);

/// Upper tail of the standard normal, accurate far into the tail.
double normal_upper_tail(double z);
/// log of normal_upper_tail, finite for large z.
double log_normal_upper_tail(double z);

}  // namespace chldp::stats
