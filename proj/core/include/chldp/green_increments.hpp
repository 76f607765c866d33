#pragma once

#include <vector>

namespace chldp {

/// Settings for the increment integrals of the 1-D Green kernel.
///
/// Every integral is computed with the spatial integral done exactly through
/// orthonormality of the cosine modes, and the time integral by the
/// trapezoid rule on a mesh graded as r_i = t (i/N)^4 so the 1/K^4 scale of
/// the truncated kernel near r = 0 is resolved.
struct GreenIncrementOptions {
  int truncation = 128;           // modes k = 0..K
  int quadrature_intervals = 4000;
  double horizon = 1.0;           // t in the space/time increment integrals
  std::vector<double> points{0.3, 0.9, 1.5, 2.1, 2.7};   // base points y
  std::vector<double> space_increments{1e-2, 2e-2, 5e-2, 1e-1};
  std::vector<double> time_increments{1e-4, 3e-4, 1e-3, 3e-3, 1e-2};
};

/// int_0^t int_D |G_r(x,y) - G_r(x,z)|^2 dx dr
double green_space_increment(double t, double y, double z, int K, int intervals);
/// int_0^t int_D |G_{r+h}(x,y) - G_r(x,y)|^2 dx dr
double green_time_increment(double t, double h, double y, int K, int intervals);
/// int_s^t int_D |G_r(x,y)|^2 dx dr
double green_square_norm(double s, double t, double y, int K, int intervals);

struct ExponentFit {
  std::vector<double> increments;
  std::vector<double> integrals;  // sup over base points
  double exponent = 0.0;          // OLS log-log slope
  double constant = 0.0;          // smallest c with integral <= c * increment^exponent on the probes
};

struct GreenIncrementReport {
  ExponentFit space;        // gamma
  ExponentFit time;         // gamma' from the time-increment integral
  ExponentFit square_norm;  // gamma' from int_0^h of |G|^2
};

/// Fits the increment exponents. Needs at least three probes per family.
GreenIncrementReport check_green_increments(const GreenIncrementOptions& opts);

}  // namespace chldp
