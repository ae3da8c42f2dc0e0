#include <cstdio>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "hplab/config.hpp"
#include "hplab/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"hp-lab: truncated Hua-Pickrell ensembles and their determinantal kernels"};
  app.set_version_flag("--version", std::string("hp-lab ") + hplab::kVersion);
  std::string command, config_path, out_dir;
  std::uint64_t seed = 0;
  int workers = 1;
  app.add_option("command", command, "sample | basis | verify-dpp | gauge-check | converge")->required();
  app.add_option("--config", config_path, "JSON config file")->required();
  auto* seed_opt = app.add_option("--seed", seed, "overrides the config seed");
  auto* workers_opt = app.add_option("--workers", workers, "worker threads (results do not depend on it)")
                          ->check(CLI::Range(1, 1024));
  auto* out_opt = app.add_option("--out", out_dir, "output directory (overrides output_dir)");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : hplab::kExitConfig;
  }

  hplab::ExperimentConfig cfg;
  try {
    if (!hplab::parse_command(command))
      throw hplab::ConfigError(hplab::ConfigErrorCode::invalid_value, "command", "unknown command '" + command + "'");
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(hplab::read_file(config_path));
    } catch (const nlohmann::json::parse_error& e) {
      throw hplab::ConfigError(hplab::ConfigErrorCode::parse_error, "", std::string("invalid JSON: ") + e.what());
    } catch (const std::runtime_error& e) {
      throw hplab::ConfigError(hplab::ConfigErrorCode::parse_error, "", e.what());
    }
    if (j.is_object()) {
      if (!j.contains("command")) j["command"] = command;
      if (j["command"] != command)
        throw hplab::ConfigError(hplab::ConfigErrorCode::invalid_value, "command",
                                 "config command '" + j["command"].dump() + "' does not match '" + command + "'");
    }
    cfg = hplab::parse_config_json(j);
  } catch (const hplab::ConfigError& e) {
    std::fprintf(stderr, "config error [%s]%s%s: %s\n", std::string(hplab::to_string(e.code())).c_str(),
                 e.field().empty() ? "" : " field ", e.field().c_str(), e.what());
    return hplab::kExitConfig;
  }
  if (*seed_opt) cfg.seed = seed;
  if (*workers_opt) cfg.workers = workers;
  if (*out_opt) cfg.output_dir = out_dir;

  try {
    const auto m = hplab::run(cfg);
    std::printf("%s: %s (%s)\n", command.c_str(), m.pass ? "PASS" : "FAIL", m.summary.c_str());
    std::printf("outputs written to %s\n", cfg.output_dir.c_str());
    return m.exit_code;
  } catch (const hplab::RunError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return e.exit_code();
  }
}
