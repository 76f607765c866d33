#include "chldp/commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <ostream>
#include <sstream>

#include "chldp/io.hpp"
#include "chldp/norms.hpp"
#include "chldp/parallel.hpp"
#include "chldp/stats.hpp"

namespace chldp {

using nlohmann::ordered_json;

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"simulate", "skeleton",  "rate-min",    "mc",           "is",
                                              "verify-a1", "verify-a2", "green-check", "scaling-study"};
  return names;
}

std::string library_version() { return "0.1.0"; }

GridField initial_field(const RunConfig& cfg) { return cfg.u0.sample(cfg.grid); }

ControlPath load_control(const RunConfig& cfg) {
  const TimeGrid time = cfg.time();
  if (cfg.control.kind == "zero") return ControlPath(cfg.grid, time);
  if (cfg.control.kind == "file") return read_control_csv(cfg.control.path, cfg.grid, time);
  if (cfg.control.kind == "certificate") {
    RateCertificate cert = read_certificate(cfg.control.path);
    if (!(cert.control.grid() == cfg.grid) || !(cert.control.time() == time))
      throw ConfigError("grid", "certificate control does not match the configured grid");
    return cert.control;
  }
  const GridField profile = cfg.control.profile.sample(cfg.grid);
  ControlPath v(cfg.grid, time);
  for (std::size_t m = 0; m < v.steps(); ++m) std::copy(profile.values.begin(), profile.values.end(), v.at(m).begin());
  return v;
}

GridField resolve_centre(const RunConfig& cfg, const CentreSpec& centre) {
  GridField g(cfg.grid);
  if (centre.base == "free_endpoint") {
    const ExponentialEuler scheme(cfg.model, cfg.solver());
    const Trajectory free = scheme.integrate(initial_field(cfg), nullptr, nullptr, 0.0);
    g = free.field(free.steps());
  }
  const GridField shift = centre.shift.sample(cfg.grid);
  for (std::size_t j = 0; j < g.values.size(); ++j) g.values[j] += shift.values[j];
  return g;
}

EventSpec build_event(const RunConfig& cfg) {
  const EventKind kind = parse_event_kind(cfg.event.kind);
  switch (kind) {
    case EventKind::terminal_ball_exit:
      return EventSpec::terminal_exit(resolve_centre(cfg, cfg.event.centre), cfg.event.delta);
    case EventKind::terminal_ball_entry:
      return EventSpec::terminal_entry(resolve_centre(cfg, cfg.event.centre), cfg.event.delta);
    case EventKind::whole_space:
      return EventSpec::whole_space();
    case EventKind::tube_exit:
    case EventKind::holder_exit: {
      const ExponentialEuler scheme(cfg.model, cfg.solver());
      Trajectory ref = scheme.integrate(initial_field(cfg), nullptr, nullptr, 0.0);
      if (kind == EventKind::tube_exit) return EventSpec::tube_exit(std::move(ref), cfg.event.delta);
      return EventSpec::holder_exit(std::move(ref), cfg.event.delta, cfg.alpha, cfg.p);
    }
  }
  throw ConfigError("", "unknown event kind");
}

RateProblem build_rate_problem(const RunConfig& cfg) {
  RateProblem prob{initial_field(cfg), cfg.model, cfg.solver(), {}};
  const GridField g = resolve_centre(cfg, cfg.target.centre);
  if (cfg.target.kind == "ball") {
    prob.target = TerminalTarget::ball(g, cfg.target.delta);
  } else if (cfg.target.kind == "ball_exit") {
    prob.target = TerminalTarget::ball_exit(g, cfg.target.delta);
  } else {
    prob.target = TerminalTarget::penalized(quadratic_penalty(g, cfg.target.weight), cfg.target.eps_ref);
  }
  return prob;
}

McSetup build_setup(const RunConfig& cfg) { return McSetup{initial_field(cfg), cfg.model, cfg.solver(), cfg.workers}; }

namespace {

struct Artifacts {
  std::filesystem::path dir;
  std::vector<std::string> names;

  void put(const std::string& name, const std::string& text) {
    write_file((dir / name).string(), text);
    names.push_back(name);
  }
};

template <class Fn>
std::string text_of(Fn&& fn) {
  std::ostringstream out;
  fn(out);
  return out.str();
}

OptimizerOptions optimizer_options(const RunConfig& cfg) {
  OptimizerOptions o = cfg.optimizer;
  o.workers = cfg.workers;
  if (cfg.control.kind != "zero") o.initial = load_control(cfg);
  return o;
}

std::vector<std::size_t> replica_schedule(const RunConfig& cfg) {
  if (!cfg.scaling.replicas.empty()) return cfg.scaling.replicas;
  return std::vector<std::size_t>(cfg.epsilon.size(), cfg.replicas);
}

ordered_json scheme_constants(const RunConfig& cfg) {
  const SolverConfig sc = cfg.solver();
  const ExponentialEuler scheme(cfg.model, sc);
  return {{"integrator", "spectral exponential Euler"},
          {"basis", "orthonormal Neumann cosine, midpoint collocation"},
          {"dt", cfg.dt},
          {"steps", sc.time.steps},
          {"cell_volume", cfg.grid.cell_volume()},
          {"blowup_threshold", sc.blowup_threshold},
          {"drift_slope_limit", scheme.drift_slope_limit()}};
}

ordered_json manifest(const std::string& command, const RunConfig& cfg, const Artifacts& art, ordered_json results) {
  const ordered_json conf = config_to_json(cfg);
  ordered_json hashed = conf;
  hashed.erase("output");
  ordered_json m;
  m["command"] = command;
  m["version"] = library_version();
  m["config_hash"] = "fnv1a64:" + hex64(fnv1a64(hashed.dump()));
  m["config"] = conf;
  m["seeds"] = {{"master", cfg.seed},
                {"rule", "splitmix-counter-v1"},
                {"replica_stream", "SeedSpec{master', r} for replica r"},
                {"per_epsilon_master", "master' = derive_master(master, epsilon index)"}};
  m["scheme"] = scheme_constants(cfg);
  m["artifacts"] = art.names;
  m["results"] = std::move(results);
  return m;
}

ordered_json cmd_simulate(const RunConfig& cfg, Artifacts& art, std::ostream& log) {
  const McSetup setup = build_setup(cfg);
  const ExponentialEuler scheme(cfg.model, setup.config);
  const ControlPath v = load_control(cfg);
  const bool controlled = cfg.control.kind != "zero";
  ordered_json results = ordered_json::array();
  for (std::size_t e = 0; e < cfg.epsilon.size(); ++e) {
    const double eps = cfg.epsilon[e];
    const std::uint64_t master = derive_master(cfg.seed, e);
    struct Row {
      double l2 = 0.0, linf = 0.0, mean = 0.0;
      bool aborted = false;
      std::size_t step = 0;
    };
    std::vector<Row> rows(cfg.replicas);
    std::vector<Trajectory> paths(cfg.replicas);
    parallel_for(
        cfg.replicas,
        [&](std::size_t r) {
          const NoisePath w = sample_sheet(cfg.grid, setup.config.time, SeedSpec{master, r});
          try {
            Trajectory u = scheme.integrate(setup.u0, &w, controlled ? &v : nullptr, eps);
            const auto end = u.at(u.steps());
            rows[r].l2 = lp_norm(cfg.grid, end, 2.0);
            for (double x : end) rows[r].linf = std::max(rows[r].linf, std::abs(x));
            rows[r].mean = stats::mean(end);
            paths[r] = std::move(u);
          } catch (const SolverAbort& a) {
            rows[r].aborted = true;
            rows[r].step = a.step();
          }
        },
        cfg.workers);
    std::string tag = "e" + std::to_string(e);
    art.put("summary_" + tag + ".csv", text_of([&](std::ostream& out) {
              out << "replica,terminal_l2,terminal_linf,terminal_mean,aborted,abort_step\n";
              for (std::size_t r = 0; r < rows.size(); ++r)
                out << r << ',' << format_double(rows[r].l2) << ',' << format_double(rows[r].linf) << ','
                    << format_double(rows[r].mean) << ',' << (rows[r].aborted ? 1 : 0) << ',' << rows[r].step << '\n';
            }));
    if (!rows[0].aborted)
      art.put("trajectory_" + tag + "_r0.csv", text_of([&](std::ostream& out) { write_trajectory_csv(paths[0], out); }));
    if (cfg.dump_noise) {
      const NoisePath w = sample_sheet(cfg.grid, setup.config.time, SeedSpec{master, 0});
      art.put("noise_" + tag + "_r0.bin", text_of([&](std::ostream& out) { dump_noise(w, out); }));
    }
    std::vector<Trajectory> ok;
    std::size_t aborted = 0;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (rows[r].aborted) {
        ++aborted;
      } else {
        ok.push_back(std::move(paths[r]));
      }
    }
    const double moment = ok.empty() ? 0.0 : moment_sup(ok, cfg.p, cfg.q);
    log << "simulate eps=" << eps << " replicas=" << cfg.replicas << " aborted=" << aborted << '\n';
    results.push_back({{"epsilon", eps}, {"replicas", cfg.replicas}, {"aborted", aborted}, {"moment_sup", moment}});
  }
  return results;
}

ordered_json cmd_skeleton(const RunConfig& cfg, Artifacts& art, std::ostream& log) {
  const ControlPath v = load_control(cfg);
  const GridField u0 = initial_field(cfg);
  const Trajectory u = solve_skeleton(u0, v, cfg.model, cfg.solver());
  art.put("trajectory.csv", text_of([&](std::ostream& out) { write_trajectory_csv(u, out); }));
  const double residual = mild_residual(u, u0, &v, nullptr, 0.0, cfg.model);
  log << "skeleton: energy=" << rate_eval(v) << " mild residual=" << residual << '\n';
  return {{"energy", rate_eval(v)}, {"mild_residual", residual}};
}

ordered_json cmd_rate_min(const RunConfig& cfg, Artifacts& art, std::ostream& log) {
  const RateProblem prob = build_rate_problem(cfg);
  const RateCertificate cert = minimize_rate(prob, optimizer_options(cfg));
  art.put("certificate.json", dump_json(certificate_to_json(cert)));
  art.put("control.csv", text_of([&](std::ostream& out) { write_control_csv(cert.control, out); }));
  art.put("endpoint.csv", text_of([&](std::ostream& out) { write_field_csv(cert.endpoint, out); }));
  log << "rate-min: cost=" << cert.cost << " residual=" << cert.residual << (cert.feasible() ? "" : " (infeasible)")
      << '\n';
  return {{"cost", cert.cost}, {"residual", cert.residual}, {"feasible", cert.feasible()}};
}

ordered_json cmd_estimate(const RunConfig& cfg, Artifacts& art, std::ostream& log, bool is) {
  const McSetup setup = build_setup(cfg);
  const EventSpec event = build_event(cfg);
  const ControlPath v = is ? load_control(cfg) : ControlPath();
  std::vector<ProbabilityEstimate> rows;
  ordered_json results = ordered_json::array();
  for (std::size_t e = 0; e < cfg.epsilon.size(); ++e) {
    const std::uint64_t master = derive_master(cfg.seed, e);
    ProbabilityEstimate est = is ? importance_sample(event, cfg.epsilon[e], v, cfg.replicas, master, setup)
                                 : mc_event_probability(event, cfg.epsilon[e], cfg.replicas, master, setup);
    log << est.method << " eps=" << est.epsilon << " p_hat=" << est.p_hat << " [" << est.ci_lo << ", " << est.ci_hi
        << "]\n";
    results.push_back(estimate_to_json(est));
    rows.push_back(std::move(est));
  }
  art.put("estimates.csv", text_of([&](std::ostream& out) { write_estimates_csv(rows, out); }));
  return results;
}

ordered_json cmd_verify_a1(const RunConfig& cfg, Artifacts& art, std::ostream& log) {
  const McSetup setup = build_setup(cfg);
  const ControlPath v = load_control(cfg);
  const GridField g = cfg.a1.profile.sample(cfg.grid);
  const A1Report rep = verify_A1(v, g, cfg.a1.frequencies, cfg.a1.bound_N, setup, cfg.alpha, cfg.p);
  art.put("a1.csv", text_of([&](std::ostream& out) { write_distance_csv(rep.rows, out); }));

  std::vector<ControlPath> family;
  const std::size_t count = cfg.a1.diameter_samples;
  for (std::size_t i = 0; i < count; ++i) {
    ControlPath vn = v;
    const double freq = static_cast<double>(i + 1);
    for (std::size_t m = 0; m < vn.steps(); ++m) {
      const double s = std::sin(freq * (static_cast<double>(m) + 0.5) * cfg.dt);
      auto row = vn.at(m);
      for (std::size_t j = 0; j < row.size(); ++j) row[j] += s * g.values[j];
    }
    family.push_back(std::move(vn));
  }
  const double diameter = count >= 2 ? empirical_diameter(family, setup, cfg.alpha, cfg.p) : 0.0;
  const double ratio = rep.rows.size() >= 2 && rep.rows.front().distance > 0.0
                           ? rep.rows.back().distance / rep.rows.front().distance
                           : 0.0;
  log << "verify-a1: last/first distance ratio=" << ratio << " diameter=" << diameter << '\n';
  ordered_json rows = ordered_json::array();
  for (const auto& r : rep.rows)
    rows.push_back({{"frequency", r.parameter}, {"distance", r.distance}, {"control_norm_sq", r.control_norm_sq}});
  return {{"rows", rows}, {"ratio_last_first", ratio}, {"empirical_diameter", diameter}};
}

ordered_json cmd_verify_a2(const RunConfig& cfg, Artifacts& art, std::ostream& log) {
  const McSetup setup = build_setup(cfg);
  const ControlPath v = load_control(cfg);
  std::optional<ControlPath> pert;
  if (!cfg.a2.perturbation.terms.empty()) {
    const GridField prof = cfg.a2.perturbation.sample(cfg.grid);
    ControlPath p(cfg.grid, cfg.time());
    for (std::size_t m = 0; m < p.steps(); ++m) std::copy(prof.values.begin(), prof.values.end(), p.at(m).begin());
    pert = std::move(p);
  }
  const A2Report rep = verify_A2(v, pert, cfg.epsilon, cfg.replicas, cfg.seed, setup, cfg.alpha, cfg.p);
  art.put("a2.csv", text_of([&](std::ostream& out) { write_distance_csv(rep.rows, out); }));
  log << "verify-a2: slope=" << rep.slope << " +- " << rep.slope_se << '\n';
  ordered_json rows = ordered_json::array();
  for (const auto& r : rep.rows)
    rows.push_back({{"epsilon", r.parameter}, {"distance", r.distance}, {"std_error", r.std_error}});
  return {{"rows", rows}, {"slope", rep.slope}, {"slope_se", rep.slope_se}};
}

ordered_json cmd_green(const RunConfig& cfg, Artifacts& art, std::ostream& log) {
  const GreenIncrementReport rep = check_green_increments(cfg.green);
  const ordered_json j = green_to_json(rep);
  art.put("green.json", dump_json(j));
  log << "green-check: gamma_hat=" << rep.space.exponent << " gamma_prime_hat=" << rep.square_norm.exponent << '\n';
  return {{"gamma_hat", rep.space.exponent}, {"gamma_prime_hat", rep.square_norm.exponent}};
}

ordered_json cmd_scaling(const RunConfig& cfg, Artifacts& art, std::ostream& log) {
  const McSetup setup = build_setup(cfg);
  const EventSpec event = build_event(cfg);
  std::optional<RateCertificate> cert;
  if (cfg.control.kind == "certificate") {
    cert = read_certificate(cfg.control.path);
  } else {
    cert = minimize_rate(build_rate_problem(cfg), optimizer_options(cfg));
    art.put("certificate.json", dump_json(certificate_to_json(*cert)));
  }
  const ScalingReport rep = ldp_scaling_study(event, cfg.epsilon, replica_schedule(cfg), cert, cfg.seed, setup,
                                              ScalingOptions{cfg.scaling.min_hits, cfg.scaling.force_is});
  art.put("scaling.json", dump_json(scaling_to_json(rep)));
  art.put("scaling.csv", text_of([&](std::ostream& out) { write_scaling_csv(rep, out); }));
  log << "scaling-study: certificate=" << rep.certificate_cost << " trend slope=" << rep.trend_slope
      << (rep.nondecreasing ? " (nondecreasing)" : " (not nondecreasing)") << '\n';
  return {{"certificate_cost", rep.certificate_cost},
          {"trend_slope", rep.trend_slope},
          {"nondecreasing", rep.nondecreasing}};
}

}  // namespace

void run_command(const std::string& command, const RunConfig& cfg, std::ostream& log) {
  const auto& names = command_names();
  if (std::find(names.begin(), names.end(), command) == names.end())
    throw ConfigError("", "unknown command '" + command + "'");
  cfg.validate();
  Artifacts art{std::filesystem::path(cfg.output), {}};
  std::filesystem::create_directories(art.dir);
  ordered_json results;
  if (command == "simulate") results = cmd_simulate(cfg, art, log);
  else if (command == "skeleton") results = cmd_skeleton(cfg, art, log);
  else if (command == "rate-min") results = cmd_rate_min(cfg, art, log);
  else if (command == "mc") results = cmd_estimate(cfg, art, log, false);
  else if (command == "is") results = cmd_estimate(cfg, art, log, true);
  else if (command == "verify-a1") results = cmd_verify_a1(cfg, art, log);
  else if (command == "verify-a2") results = cmd_verify_a2(cfg, art, log);
  else if (command == "green-check") results = cmd_green(cfg, art, log);
  else results = cmd_scaling(cfg, art, log);
  const ordered_json m = manifest(command, cfg, art, std::move(results));
  write_file((art.dir / "manifest.json").string(), dump_json(m));
}

}  // namespace chldp
