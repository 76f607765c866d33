// chldp command-line front end.
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "chldp/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Small-noise experiments for the stochastic Cahn-Hilliard equation"};
  std::string command;
  std::string config_path;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> replicas;
  std::vector<double> epsilon;

  app.add_option("command", command, "Command to run")
      ->required()
      ->check(CLI::IsMember(chldp::command_names()));
  app.add_option("--config", config_path, "JSON config file");
  app.add_option("--out", out, "Output directory (overrides config)");
  app.add_option("--seed", seed, "Master seed (overrides config)");
  app.add_option("--replicas", replicas, "Replica count (overrides config)");
  app.add_option("--epsilon", epsilon, "Noise scale or schedule (overrides config)")->delimiter(',');
  CLI11_PARSE(app, argc, argv);

  try {
    chldp::RunConfig cfg = config_path.empty() ? chldp::parse_config(nlohmann::json::object())
                                               : chldp::load_config(config_path);
    if (out) cfg.output = *out;
    if (seed) cfg.seed = *seed;
    if (replicas) cfg.replicas = *replicas;
    if (!epsilon.empty()) cfg.epsilon = epsilon;
    cfg.validate();
    chldp::run_command(command, cfg, std::cerr);
  } catch (const chldp::ConfigError& e) {
    std::cerr << "invalid config: " << e.what() << '\n';
    return 2;
  } catch (const chldp::SolverAbort& e) {
    std::cerr << "solver abort: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
