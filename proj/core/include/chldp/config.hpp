#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "chldp/green_increments.hpp"
#include "chldp/integrator.hpp"
#include "chldp/ldp.hpp"
#include "chldp/rate.hpp"

namespace chldp {

/// Finite cosine series sum_i c_i cos(k_i1 x_1) [cos(k_i2 x_2)]. Plain (unnormalized)
/// cosines; a u0 given this way is smooth, so its Holder exponent is 1.
struct CosineSeries {
  std::vector<std::pair<std::array<int, 2>, double>> terms;

  GridField sample(const Grid& grid) const;
};

/// Terminal centre g = base + shift, base either zero or the zero-control skeleton endpoint.
struct CentreSpec {
  std::string base = "free_endpoint";  // "zero" | "free_endpoint"
  CosineSeries shift;
};

struct ControlSource {
  std::string kind = "zero";  // "zero" | "file" | "certificate" | "cosine"
  std::string path;           // CSV (file) or certificate JSON
  CosineSeries profile;       // cosine: v(t, x) = profile(x)
};

struct TargetConfig {
  std::string kind = "ball";  // "ball" | "ball_exit" | "penalty"
  CentreSpec centre;
  double delta = 0.1;
  double weight = 1.0;   // penalty: Phi = weight/2 ||u - g||^2
  double eps_ref = 1.0;  // penalty
};

struct EventConfig {
  std::string kind = "terminal_ball_exit";
  CentreSpec centre;
  double delta = 0.1;
};

struct A1Config {
  std::vector<double> frequencies{1.0, 4.0, 16.0, 64.0};
  CosineSeries profile;  // g(x)
  double bound_N = 10.0;
  std::size_t diameter_samples = 20;
};

struct A2Config {
  CosineSeries perturbation;  // empty: v_eps = v
};

struct ScalingConfig {
  std::vector<std::size_t> replicas;  // per epsilon; empty: top-level replicas for all
  std::size_t min_hits = 20;
  bool force_is = false;
};

/// Parsed and validated run configuration. See README for the key schema.
struct RunConfig {
  ModelSpec model;
  CosineSeries u0;
  Grid grid{1, 64};
  double dt = 1e-4;
  double horizon = 0.5;
  double p = 4.0;
  double q = 4.0;
  double alpha = 0.2;
  ControlSource control;
  std::vector<double> epsilon{1e-2};
  std::size_t replicas = 100;
  std::uint64_t seed = 0;
  std::string output = "out";
  unsigned workers = 0;
  bool dump_noise = false;

  TargetConfig target;
  OptimizerOptions optimizer;
  EventConfig event;
  A1Config a1;
  A2Config a2;
  GreenIncrementOptions green;
  ScalingConfig scaling;

  TimeGrid time() const;
  SolverConfig solver() const;

  /// Throws ConfigError naming the violated hypothesis: (H1) cubic drift,
  /// (H2) bounded Lipschitz sigma, (H3) p >= 4 and q >= p, (H3') alpha below
  /// gamma/4 ^ (1 - d/4)/2 with gamma = 1 for cosine-series u0.
  void validate() const;
};

RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::string& path);
/// Canonical JSON of a config (stable key order); its hash identifies the run.
nlohmann::ordered_json config_to_json(const RunConfig& cfg);

}  // namespace chldp
