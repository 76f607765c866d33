#include "chldp/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <string_view>

#include "chldp/spectral.hpp"

namespace chldp {

using nlohmann::json;
using nlohmann::ordered_json;

GridField CosineSeries::sample(const Grid& grid) const {
  GridField out(grid);
  for (const auto& [k, c] : terms) {
    if (k[0] < 0 || k[1] < 0) throw ConfigError("", "cosine wave numbers must be nonnegative");
    if (grid.dim == 1 && k[1] != 0) throw ConfigError("", "second wave number given for a 1-D grid");
    for (int i = 0; i < (grid.dim == 1 ? grid.n : grid.n * grid.n); ++i) {
      const int i0 = grid.dim == 1 ? i : i / grid.n;
      const int i1 = grid.dim == 1 ? 0 : i % grid.n;
      double val = c * std::cos(k[0] * grid.point(i0));
      if (grid.dim == 2) val *= std::cos(k[1] * grid.point(i1));
      out.values[static_cast<std::size_t>(i)] += val;
    }
  }
  return out;
}

namespace {

void check_keys(const json& j, std::initializer_list<std::string_view> allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError("", where + " must be an object");
  for (const auto& [key, _] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw ConfigError("", "unknown key '" + key + "' in " + where);
  }
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError("", std::string("bad value for '") + key + "': " + e.what());
  }
}

CosineSeries parse_series(const json& j, const std::string& where) {
  CosineSeries s;
  if (j.is_null()) return s;
  if (!j.is_array()) throw ConfigError("", where + " must be a list");
  for (std::size_t i = 0; i < j.size(); ++i) {
    const json& term = j[i];
    if (term.is_number()) {
      const double c = term.get<double>();
      if (c != 0.0) s.terms.push_back({{static_cast<int>(i), 0}, c});
    } else if (term.is_object()) {
      check_keys(term, {"k", "c"}, where);
      const auto k = term.at("k").get<std::vector<int>>();
      if (k.empty() || k.size() > 2) throw ConfigError("", where + ": wave number needs 1 or 2 entries");
      s.terms.push_back({{k[0], k.size() > 1 ? k[1] : 0}, term.at("c").get<double>()});
    } else {
      throw ConfigError("", where + " entries must be numbers or {k, c} objects");
    }
  }
  return s;
}

ordered_json series_json(const CosineSeries& s) {
  ordered_json arr = ordered_json::array();
  for (const auto& [k, c] : s.terms) {
    ordered_json t;
    t["k"] = std::vector<int>{k[0], k[1]};
    t["c"] = c;
    arr.push_back(t);
  }
  return arr;
}

CentreSpec parse_centre(const json& j, const std::string& where) {
  CentreSpec c;
  if (j.is_null()) return c;
  check_keys(j, {"base", "shift"}, where);
  c.base = get_or<std::string>(j, "base", c.base);
  if (c.base != "zero" && c.base != "free_endpoint") throw ConfigError("", where + ".base must be zero or free_endpoint");
  if (j.contains("shift")) c.shift = parse_series(j.at("shift"), where + ".shift");
  return c;
}

ordered_json centre_json(const CentreSpec& c) {
  ordered_json o;
  o["base"] = c.base;
  o["shift"] = series_json(c.shift);
  return o;
}

const json& section(const json& j, const char* key) {
  static const json empty = json::object();
  return j.contains(key) ? j.at(key) : empty;
}

}  // namespace

TimeGrid RunConfig::time() const {
  const auto steps = static_cast<std::size_t>(std::llround(horizon / dt));
  return TimeGrid{dt, steps};
}

SolverConfig RunConfig::solver() const { return SolverConfig{grid, time()}; }

void RunConfig::validate() const {
  if (grid.dim != 1 && grid.dim != 2) throw ConfigError("grid", "dimension must be 1 or 2");
  if (grid.n < 2) throw ConfigError("grid", "need at least two points per axis");
  if (!(dt > 0.0) || !(horizon > 0.0)) throw ConfigError("grid", "dt and T must be positive");
  const double steps = std::round(horizon / dt);
  if (steps < 1.0 || std::abs(steps * dt - horizon) > 1e-9 * horizon)
    throw ConfigError("grid", "T must be an integer multiple of dt");
  model.validate();
  if (!(p >= 4.0)) throw ConfigError("(H3)", "p must be at least 4");
  if (!(q >= p)) throw ConfigError("(H3)", "moment order q must be at least p");
  // Cosine-series initial data is smooth, gamma = 1.
  const double gamma = 1.0;
  const double ceiling = std::min(gamma / 4.0, 0.5 * (1.0 - grid.dim / 4.0));
  if (!(alpha > 0.0 && alpha < ceiling))
    throw ConfigError("(H3')", "alpha must lie in (0, " + std::to_string(ceiling) + ")");
  for (double e : epsilon)
    if (!(e >= 0.0)) throw ConfigError("", "noise scales must be nonnegative");
  if (replicas == 0) throw ConfigError("", "replicas must be positive");
  if (!scaling.replicas.empty() && scaling.replicas.size() != epsilon.size())
    throw ConfigError("", "scaling.replicas must have one entry per epsilon");
  if (control.kind != "zero" && control.kind != "file" && control.kind != "certificate" && control.kind != "cosine")
    throw ConfigError("", "control.source must be zero, file, certificate or cosine");
  if ((control.kind == "file" || control.kind == "certificate") && control.path.empty())
    throw ConfigError("", "control.path is required for file and certificate sources");
  if (target.kind != "ball" && target.kind != "ball_exit" && target.kind != "penalty")
    throw ConfigError("", "target.kind must be ball, ball_exit or penalty");
  parse_event_kind(event.kind);
}

RunConfig parse_config(const json& j) {
  check_keys(j,
             {"model", "grid", "exponents", "control", "epsilon", "replicas", "seed", "output", "workers", "dump_noise",
              "target", "optimizer", "event", "a1", "a2", "green", "scaling"},
             "config");
  RunConfig cfg;

  const json& model = section(j, "model");
  check_keys(model, {"f", "sigma", "u0", "linear_test"}, "model");
  if (model.contains("f")) {
    const auto f = model.at("f").get<std::vector<double>>();
    if (f.size() != 4) throw ConfigError("(H1)", "model.f needs four coefficients c3, c2, c1, c0");
    std::copy(f.begin(), f.end(), cfg.model.f.begin());
  }
  cfg.model.linear_test = get_or<bool>(model, "linear_test", false);
  const json& sigma = section(model, "sigma");
  check_keys(sigma, {"preset", "s0", "clip"}, "model.sigma");
  cfg.model.sigma.kind = SigmaPreset::parse_kind(get_or<std::string>(sigma, "preset", "constant"));
  cfg.model.sigma.s0 = get_or<double>(sigma, "s0", 1.0);
  cfg.model.sigma.clip = get_or<double>(sigma, "clip", 1.0);
  cfg.u0 = model.contains("u0") ? parse_series(model.at("u0"), "model.u0") : CosineSeries{{{{1, 0}, 0.1}}};

  const json& grid = section(j, "grid");
  check_keys(grid, {"d", "n", "dt", "T"}, "grid");
  cfg.grid.dim = get_or<int>(grid, "d", 1);
  cfg.grid.n = get_or<int>(grid, "n", 64);
  cfg.dt = get_or<double>(grid, "dt", 1e-4);
  cfg.horizon = get_or<double>(grid, "T", 0.5);

  const json& ex = section(j, "exponents");
  check_keys(ex, {"p", "q", "alpha"}, "exponents");
  cfg.p = get_or<double>(ex, "p", 4.0);
  cfg.q = get_or<double>(ex, "q", 4.0);
  cfg.alpha = get_or<double>(ex, "alpha", 0.2);

  const json& control = section(j, "control");
  check_keys(control, {"source", "path", "profile"}, "control");
  cfg.control.kind = get_or<std::string>(control, "source", "zero");
  cfg.control.path = get_or<std::string>(control, "path", "");
  if (control.contains("profile")) cfg.control.profile = parse_series(control.at("profile"), "control.profile");

  if (j.contains("epsilon")) {
    const json& e = j.at("epsilon");
    cfg.epsilon = e.is_array() ? e.get<std::vector<double>>() : std::vector<double>{e.get<double>()};
  }
  cfg.replicas = get_or<std::size_t>(j, "replicas", cfg.replicas);
  cfg.seed = get_or<std::uint64_t>(j, "seed", cfg.seed);
  cfg.output = get_or<std::string>(j, "output", cfg.output);
  cfg.workers = get_or<unsigned>(j, "workers", 0);
  cfg.dump_noise = get_or<bool>(j, "dump_noise", false);

  const json& target = section(j, "target");
  check_keys(target, {"kind", "centre", "delta", "weight", "eps_ref"}, "target");
  cfg.target.kind = get_or<std::string>(target, "kind", "ball");
  if (target.contains("centre")) cfg.target.centre = parse_centre(target.at("centre"), "target.centre");
  cfg.target.delta = get_or<double>(target, "delta", cfg.target.delta);
  cfg.target.weight = get_or<double>(target, "weight", cfg.target.weight);
  cfg.target.eps_ref = get_or<double>(target, "eps_ref", cfg.target.eps_ref);

  const json& opt = section(j, "optimizer");
  check_keys(opt, {"gtol", "max_iter", "mu", "random_starts", "start_scale", "seed", "feasibility_tol"}, "optimizer");
  cfg.optimizer.gtol = get_or<double>(opt, "gtol", cfg.optimizer.gtol);
  cfg.optimizer.max_iter = get_or<int>(opt, "max_iter", cfg.optimizer.max_iter);
  cfg.optimizer.mu_schedule = get_or<std::vector<double>>(opt, "mu", cfg.optimizer.mu_schedule);
  cfg.optimizer.random_starts = get_or<int>(opt, "random_starts", cfg.optimizer.random_starts);
  cfg.optimizer.start_scale = get_or<double>(opt, "start_scale", cfg.optimizer.start_scale);
  cfg.optimizer.seed = get_or<std::uint64_t>(opt, "seed", cfg.optimizer.seed);
  cfg.optimizer.feasibility_tol = get_or<double>(opt, "feasibility_tol", cfg.optimizer.feasibility_tol);

  const json& event = section(j, "event");
  check_keys(event, {"kind", "centre", "delta"}, "event");
  cfg.event.kind = get_or<std::string>(event, "kind", cfg.event.kind);
  if (event.contains("centre")) cfg.event.centre = parse_centre(event.at("centre"), "event.centre");
  cfg.event.delta = get_or<double>(event, "delta", cfg.event.delta);

  const json& a1 = section(j, "a1");
  check_keys(a1, {"frequencies", "profile", "bound_N", "diameter_samples"}, "a1");
  cfg.a1.frequencies = get_or<std::vector<double>>(a1, "frequencies", cfg.a1.frequencies);
  cfg.a1.profile = a1.contains("profile") ? parse_series(a1.at("profile"), "a1.profile") : CosineSeries{{{{1, 0}, 1.0}}};
  cfg.a1.bound_N = get_or<double>(a1, "bound_N", cfg.a1.bound_N);
  cfg.a1.diameter_samples = get_or<std::size_t>(a1, "diameter_samples", cfg.a1.diameter_samples);

  const json& a2 = section(j, "a2");
  check_keys(a2, {"perturbation"}, "a2");
  if (a2.contains("perturbation")) cfg.a2.perturbation = parse_series(a2.at("perturbation"), "a2.perturbation");

  const json& green = section(j, "green");
  check_keys(green, {"truncation", "intervals", "horizon", "points", "space_increments", "time_increments"}, "green");
  cfg.green.truncation = get_or<int>(green, "truncation", cfg.green.truncation);
  cfg.green.quadrature_intervals = get_or<int>(green, "intervals", cfg.green.quadrature_intervals);
  cfg.green.horizon = get_or<double>(green, "horizon", cfg.green.horizon);
  cfg.green.points = get_or<std::vector<double>>(green, "points", cfg.green.points);
  cfg.green.space_increments = get_or<std::vector<double>>(green, "space_increments", cfg.green.space_increments);
  cfg.green.time_increments = get_or<std::vector<double>>(green, "time_increments", cfg.green.time_increments);

  const json& scaling = section(j, "scaling");
  check_keys(scaling, {"replicas", "min_hits", "force_is"}, "scaling");
  cfg.scaling.replicas = get_or<std::vector<std::size_t>>(scaling, "replicas", {});
  cfg.scaling.min_hits = get_or<std::size_t>(scaling, "min_hits", cfg.scaling.min_hits);
  cfg.scaling.force_is = get_or<bool>(scaling, "force_is", false);

  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config file '" + path + "'");
  json j;
  try {
    j = json::parse(in, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(j);
}

ordered_json config_to_json(const RunConfig& cfg) {
  ordered_json j;
  ordered_json model;
  model["f"] = std::vector<double>(cfg.model.f.begin(), cfg.model.f.end());
  model["sigma"] = {{"preset", cfg.model.sigma.name()}, {"s0", cfg.model.sigma.s0}, {"clip", cfg.model.sigma.clip}};
  model["u0"] = series_json(cfg.u0);
  model["linear_test"] = cfg.model.linear_test;
  j["model"] = model;
  j["grid"] = {{"d", cfg.grid.dim}, {"n", cfg.grid.n}, {"dt", cfg.dt}, {"T", cfg.horizon}};
  j["exponents"] = {{"p", cfg.p}, {"q", cfg.q}, {"alpha", cfg.alpha}};
  j["control"] = {{"source", cfg.control.kind}, {"path", cfg.control.path}, {"profile", series_json(cfg.control.profile)}};
  j["epsilon"] = cfg.epsilon;
  j["replicas"] = cfg.replicas;
  j["seed"] = cfg.seed;
  j["output"] = cfg.output;
  j["workers"] = cfg.workers;
  j["dump_noise"] = cfg.dump_noise;
  j["target"] = {{"kind", cfg.target.kind},
                 {"centre", centre_json(cfg.target.centre)},
                 {"delta", cfg.target.delta},
                 {"weight", cfg.target.weight},
                 {"eps_ref", cfg.target.eps_ref}};
  j["optimizer"] = {{"gtol", cfg.optimizer.gtol},
                    {"max_iter", cfg.optimizer.max_iter},
                    {"mu", cfg.optimizer.mu_schedule},
                    {"random_starts", cfg.optimizer.random_starts},
                    {"start_scale", cfg.optimizer.start_scale},
                    {"seed", cfg.optimizer.seed},
                    {"feasibility_tol", cfg.optimizer.feasibility_tol}};
  j["event"] = {{"kind", cfg.event.kind}, {"centre", centre_json(cfg.event.centre)}, {"delta", cfg.event.delta}};
  j["a1"] = {{"frequencies", cfg.a1.frequencies},
             {"profile", series_json(cfg.a1.profile)},
             {"bound_N", cfg.a1.bound_N},
             {"diameter_samples", cfg.a1.diameter_samples}};
  j["a2"] = {{"perturbation", series_json(cfg.a2.perturbation)}};
  j["green"] = {{"truncation", cfg.green.truncation},
                {"intervals", cfg.green.quadrature_intervals},
                {"horizon", cfg.green.horizon},
                {"points", cfg.green.points},
                {"space_increments", cfg.green.space_increments},
                {"time_increments", cfg.green.time_increments}};
  j["scaling"] = {{"replicas", cfg.scaling.replicas}, {"min_hits", cfg.scaling.min_hits}, {"force_is", cfg.scaling.force_is}};
  return j;
}

}  // namespace chldp
