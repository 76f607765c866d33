#include "chldp/model.hpp"

#include <algorithm>
#include <cmath>

#include "chldp/error.hpp"

namespace chldp {

double SigmaPreset::eval(double u) const noexcept {
  switch (kind) {
    case SigmaKind::constant:
      return s0;
    case SigmaKind::bounded_rational:
      return s0 / (1.0 + u * u);
    case SigmaKind::clipped_linear:
      return std::clamp(u, -clip, clip);
  }
  return 0.0;
}

double SigmaPreset::derivative(double u) const noexcept {
  switch (kind) {
    case SigmaKind::constant:
      return 0.0;
    case SigmaKind::bounded_rational: {
      const double d = 1.0 + u * u;
      return -2.0 * s0 * u / (d * d);
    }
    case SigmaKind::clipped_linear:
      return (u > -clip && u < clip) ? 1.0 : 0.0;
  }
  return 0.0;
}

double SigmaPreset::sup_bound() const noexcept {
  switch (kind) {
    case SigmaKind::constant:
    case SigmaKind::bounded_rational:
      return std::abs(s0);
    case SigmaKind::clipped_linear:
      return clip;
  }
  return 0.0;
}

double SigmaPreset::lipschitz() const noexcept {
  switch (kind) {
    case SigmaKind::constant:
      return 0.0;
    case SigmaKind::bounded_rational:
      // max |d/du s0/(1+u^2)| at u = 1/sqrt(3)
      return std::abs(s0) * 3.0 * std::sqrt(3.0) / 8.0;
    case SigmaKind::clipped_linear:
      return 1.0;
  }
  return 0.0;
}

std::string SigmaPreset::name() const {
  switch (kind) {
    case SigmaKind::constant:
      return "constant";
    case SigmaKind::bounded_rational:
      return "bounded_rational";
    case SigmaKind::clipped_linear:
      return "clipped_linear";
  }
  return "unknown";
}

SigmaKind SigmaPreset::parse_kind(const std::string& name) {
  if (name == "constant") return SigmaKind::constant;
  if (name == "bounded_rational") return SigmaKind::bounded_rational;
  if (name == "clipped_linear") return SigmaKind::clipped_linear;
  throw ConfigError("(H2)", "unknown sigma preset '" + name + "'");
}

void ModelSpec::validate() const {
  for (double c : f)
    if (!std::isfinite(c)) throw ConfigError("(H1)", "drift coefficients must be finite");
  if (!linear_test && !(f[0] > 0.0))
    throw ConfigError("(H1)", "f must be a cubic with positive leading coefficient");
  if (!std::isfinite(sigma.s0)) throw ConfigError("(H2)", "sigma scale must be finite");
  if (sigma.kind == SigmaKind::clipped_linear && !(sigma.clip > 0.0 && std::isfinite(sigma.clip)))
    throw ConfigError("(H2)", "clipped sigma needs a finite positive bound");
}

ModelSpec ModelSpec::linear(double s0) {
  ModelSpec m;
  m.f = {0.0, 0.0, 0.0, 0.0};
  m.sigma = {SigmaKind::constant, s0, 1.0};
  m.linear_test = true;
  return m;
}

void f_eval(const ModelSpec& spec, std::span<const double> u, std::span<double> out) {
  for (std::size_t j = 0; j < u.size(); ++j) out[j] = spec.f_eval(u[j]);
}

void sigma_eval(const ModelSpec& spec, std::span<const double> u, std::span<double> out) {
  for (std::size_t j = 0; j < u.size(); ++j) out[j] = spec.sigma.eval(u[j]);
}

}  // namespace chldp
