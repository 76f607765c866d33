#pragma once

#include <array>
#include <span>
#include <string>

namespace chldp {

/// Bounded, Lipschitz noise coefficient presets.
enum class SigmaKind {
  constant,          // s0
  bounded_rational,  // s0 / (1 + u^2)
  clipped_linear,    // clamp(u, -B, B)
};

struct SigmaPreset {
  SigmaKind kind = SigmaKind::constant;
  double s0 = 1.0;
  double clip = 1.0;  // B for clipped_linear

  double eval(double u) const noexcept;
  double derivative(double u) const noexcept;
  /// sup |sigma|
  double sup_bound() const noexcept;
  /// Lipschitz constant
  double lipschitz() const noexcept;

  std::string name() const;
  static SigmaKind parse_kind(const std::string& name);
};

/// Drift nonlinearity f(u) = c3 u^3 + c2 u^2 + c1 u + c0 and noise coefficient.
/// The default f = F' with F(u) = (1 - u^2)^2.
struct ModelSpec {
  std::array<double, 4> f{4.0, 0.0, -4.0, 0.0};  // c3, c2, c1, c0
  SigmaPreset sigma;
  /// Allows c3 == 0 (linear oracles in tests). Never set for production runs.
  bool linear_test = false;

  double f_eval(double u) const noexcept { return ((f[0] * u + f[1]) * u + f[2]) * u + f[3]; }
  double f_prime(double u) const noexcept { return (3.0 * f[0] * u + 2.0 * f[1]) * u + f[2]; }
  double sigma_eval(double u) const noexcept { return sigma.eval(u); }

  /// Checks the cubic-drift and bounded-sigma hypotheses; throws ConfigError naming the one violated.
  void validate() const;

  /// f == 0 and sigma == constant; convenience for the linear fixtures.
  static ModelSpec linear(double s0);
};

void f_eval(const ModelSpec& spec, std::span<const double> u, std::span<double> out);
void sigma_eval(const ModelSpec& spec, std::span<const double> u, std::span<double> out);

}  // namespace chldp
