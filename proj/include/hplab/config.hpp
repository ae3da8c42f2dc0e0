#ifndef HPLAB_CONFIG_HPP
#define HPLAB_CONFIG_HPP

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "hplab/core.hpp"
#include "hplab/sampling.hpp"
#include "hplab/truncation.hpp"

namespace hplab {

enum class Command { sample, basis, verify_dpp, gauge_check, converge };

inline std::string_view to_string(Command c) {
  switch (c) {
    case Command::sample: return "sample";
    case Command::basis: return "basis";
    case Command::verify_dpp: return "verify-dpp";
    case Command::gauge_check: return "gauge-check";
    case Command::converge: return "converge";
  }
  return "?";
}

inline std::optional<Command> parse_command(std::string_view s) {
  for (Command c : {Command::sample, Command::basis, Command::verify_dpp, Command::gauge_check, Command::converge})
    if (to_string(c) == s) return c;
  return std::nullopt;
}

enum class ConfigErrorCode {
  parse_error = 10,
  unknown_key = 11,
  missing_field = 12,
  invalid_delta = 13,
  sampler_incompatible = 14,
  invalid_value = 15,
  type_error = 16,
};

inline std::string_view to_string(ConfigErrorCode c) {
  switch (c) {
    case ConfigErrorCode::parse_error: return "parse_error";
    case ConfigErrorCode::unknown_key: return "unknown_key";
    case ConfigErrorCode::missing_field: return "missing_field";
    case ConfigErrorCode::invalid_delta: return "invalid_delta";
    case ConfigErrorCode::sampler_incompatible: return "sampler_incompatible";
    case ConfigErrorCode::invalid_value: return "invalid_value";
    case ConfigErrorCode::type_error: return "type_error";
  }
  return "?";
}

class ConfigError : public std::invalid_argument {
 public:
  ConfigError(ConfigErrorCode code, std::string field, const std::string& msg)
      : std::invalid_argument(msg), code_(code), field_(std::move(field)) {}
  ConfigErrorCode code() const { return code_; }
  const std::string& field() const { return field_; }

 private:
  ConfigErrorCode code_;
  std::string field_;
};

enum class SampleSource { truncation, projection };

struct CellDescriptor {
  int rings = 4;
  int sectors = 6;
  double r_max = 0.95;
};

struct ExperimentConfig {
  Command command = Command::sample;
  HPParams params;
  int samples = 0;
  std::uint64_t seed = 0;
  SamplerKind sampler = SamplerKind::hp_rejection;
  MHConfig mh;
  CellDescriptor cells;
  std::string output_dir = "hp-lab-out";
  double level = 1e-3;
  int workers = 1;
  SampleSource source = SampleSource::truncation;
  std::optional<Complex> predict_delta;
  int tuples = 100;
  int max_points = 12;
  std::vector<int> n_list;
  double grid_radius = 0.6;

  nlohmann::json to_json() const;
};

namespace detail {

using nlohmann::json;

inline const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys{"command", "n", "m", "delta", "samples", "seed", "sampler",
                                          "mh", "cells", "output_dir", "level", "workers", "source",
                                          "predict_delta", "tuples", "max_points", "n_list", "grid_radius"};
  return keys;
}

inline void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& prefix) {
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!allowed.count(it.key()))
      throw ConfigError(ConfigErrorCode::unknown_key, prefix + it.key(), "unknown key '" + prefix + it.key() + "'");
}

inline Complex get_complex(const json& v, const std::string& field) {
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
    throw ConfigError(ConfigErrorCode::type_error, field, "field '" + field + "' must be [re, im]");
  return {v[0].get<double>(), v[1].get<double>()};
}

inline long long get_int(const json& v, const std::string& field, long long lo, long long hi) {
  if (!v.is_number_integer())
    throw ConfigError(ConfigErrorCode::type_error, field, "field '" + field + "' must be an integer");
  const long long x = v.get<long long>();
  if (x < lo || x > hi)
    throw ConfigError(ConfigErrorCode::invalid_value, field,
                      "field '" + field + "' out of range [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  return x;
}

inline double get_real(const json& v, const std::string& field) {
  if (!v.is_number()) throw ConfigError(ConfigErrorCode::type_error, field, "field '" + field + "' must be a number");
  return v.get<double>();
}

inline std::string get_string(const json& v, const std::string& field) {
  if (!v.is_string()) throw ConfigError(ConfigErrorCode::type_error, field, "field '" + field + "' must be a string");
  return v.get<std::string>();
}

inline void require_field(const json& obj, const std::string& field, Command cmd) {
  if (!obj.contains(field))
    throw ConfigError(ConfigErrorCode::missing_field, field,
                      "missing required field '" + field + "' for command " + std::string(to_string(cmd)));
}

}  // namespace detail

/// Parses and validates a config object. Unknown keys are rejected. The
/// checks run in a fixed order: keys, command, delta, sampler compatibility,
/// then command-specific required fields and value ranges.
inline ExperimentConfig parse_config_json(const nlohmann::json& j) {
  using namespace detail;
  if (!j.is_object()) throw ConfigError(ConfigErrorCode::type_error, "", "config must be a JSON object");
  check_keys(j, known_keys(), "");

  ExperimentConfig c;
  if (!j.contains("command")) throw ConfigError(ConfigErrorCode::missing_field, "command", "missing required field 'command'");
  const auto cmd = parse_command(get_string(j["command"], "command"));
  if (!cmd)
    throw ConfigError(ConfigErrorCode::invalid_value, "command",
                      "field 'command' must be one of sample, basis, verify-dpp, gauge-check, converge");
  c.command = *cmd;

  if (j.contains("delta")) c.params.delta = get_complex(j["delta"], "delta");
  if (!(c.params.delta.real() > -0.5) || !std::isfinite(c.params.delta.imag()))
    throw ConfigError(ConfigErrorCode::invalid_delta, "delta", "Re(delta) must exceed -1/2");

  if (j.contains("sampler")) {
    const auto s = parse_sampler_kind(get_string(j["sampler"], "sampler"));
    if (!s) throw ConfigError(ConfigErrorCode::invalid_value, "sampler", "field 'sampler' must be haar, hp_rejection or hp_mh");
    c.sampler = *s;
  } else {
    c.sampler = c.params.delta.real() >= 0.0 ? SamplerKind::hp_rejection : SamplerKind::hp_mh;
  }
  if (c.sampler == SamplerKind::hp_rejection && c.params.delta.real() < 0.0)
    throw ConfigError(ConfigErrorCode::sampler_incompatible, "sampler", "sampler hp_rejection requires Re(delta) >= 0");
  if (c.sampler == SamplerKind::haar && c.params.delta != Complex{0.0, 0.0})
    throw ConfigError(ConfigErrorCode::sampler_incompatible, "sampler", "sampler haar requires delta = 0");

  switch (c.command) {
    case Command::sample:
    case Command::verify_dpp:
      for (const char* f : {"n", "m", "delta", "samples"}) require_field(j, f, c.command);
      break;
    case Command::basis:
      for (const char* f : {"n", "m", "delta"}) require_field(j, f, c.command);
      break;
    case Command::gauge_check:
      for (const char* f : {"m", "delta"}) require_field(j, f, c.command);
      break;
    case Command::converge:
      for (const char* f : {"m", "delta", "n_list"}) require_field(j, f, c.command);
      break;
  }

  if (j.contains("n")) c.params.n = static_cast<int>(get_int(j["n"], "n", 1, 4096));
  if (j.contains("m")) c.params.m = static_cast<int>(get_int(j["m"], "m", 1, 4096));
  if (j.contains("samples")) c.samples = static_cast<int>(get_int(j["samples"], "samples", 1, 1'000'000'000));
  if (j.contains("seed")) {
    if (!j["seed"].is_number_integer()) throw ConfigError(ConfigErrorCode::type_error, "seed", "field 'seed' must be an integer");
    c.seed = j["seed"].is_number_unsigned() ? j["seed"].get<std::uint64_t>()
                                            : static_cast<std::uint64_t>(j["seed"].get<std::int64_t>());
  }
  if (j.contains("mh")) {
    const auto& mh = j["mh"];
    if (!mh.is_object()) throw ConfigError(ConfigErrorCode::type_error, "mh", "field 'mh' must be an object");
    check_keys(mh, {"burn_in", "thinning", "chains"}, "mh.");
    if (mh.contains("burn_in")) c.mh.burn_in = static_cast<int>(get_int(mh["burn_in"], "mh.burn_in", 0, 1'000'000'000));
    if (mh.contains("thinning")) c.mh.thinning = static_cast<int>(get_int(mh["thinning"], "mh.thinning", 1, 1'000'000'000));
    if (mh.contains("chains")) c.mh.chains = static_cast<int>(get_int(mh["chains"], "mh.chains", 1, 1'000'000));
  }
  if (j.contains("cells")) {
    const auto& cl = j["cells"];
    if (!cl.is_object()) throw ConfigError(ConfigErrorCode::type_error, "cells", "field 'cells' must be an object");
    check_keys(cl, {"rings", "sectors", "r_max"}, "cells.");
    if (cl.contains("rings")) c.cells.rings = static_cast<int>(get_int(cl["rings"], "cells.rings", 1, 64));
    if (cl.contains("sectors")) c.cells.sectors = static_cast<int>(get_int(cl["sectors"], "cells.sectors", 1, 256));
    if (cl.contains("r_max")) {
      c.cells.r_max = get_real(cl["r_max"], "cells.r_max");
      if (!(c.cells.r_max > 0.0 && c.cells.r_max < 1.0))
        throw ConfigError(ConfigErrorCode::invalid_value, "cells.r_max", "field 'cells.r_max' must lie in (0, 1)");
    }
  }
  if (j.contains("output_dir")) c.output_dir = get_string(j["output_dir"], "output_dir");
  if (j.contains("level")) {
    c.level = get_real(j["level"], "level");
    if (!(c.level > 0.0 && c.level < 1.0))
      throw ConfigError(ConfigErrorCode::invalid_value, "level", "field 'level' must lie in (0, 1)");
  }
  if (j.contains("workers")) c.workers = static_cast<int>(get_int(j["workers"], "workers", 1, 1024));
  if (j.contains("source")) {
    const auto s = get_string(j["source"], "source");
    if (s == "truncation") c.source = SampleSource::truncation;
    else if (s == "projection") c.source = SampleSource::projection;
    else throw ConfigError(ConfigErrorCode::invalid_value, "source", "field 'source' must be truncation or projection");
  }
  if (j.contains("predict_delta")) {
    c.predict_delta = get_complex(j["predict_delta"], "predict_delta");
    if (!(c.predict_delta->real() > -0.5))
      throw ConfigError(ConfigErrorCode::invalid_delta, "predict_delta", "Re(predict_delta) must exceed -1/2");
  }
  if (j.contains("tuples")) c.tuples = static_cast<int>(get_int(j["tuples"], "tuples", 1, 1'000'000));
  if (j.contains("max_points")) c.max_points = static_cast<int>(get_int(j["max_points"], "max_points", 1, 12));
  if (j.contains("n_list")) {
    const auto& nl = j["n_list"];
    if (!nl.is_array() || nl.empty())
      throw ConfigError(ConfigErrorCode::type_error, "n_list", "field 'n_list' must be a non-empty array of integers");
    for (const auto& v : nl) c.n_list.push_back(static_cast<int>(get_int(v, "n_list", 1, 4096)));
  }
  if (j.contains("grid_radius")) {
    c.grid_radius = get_real(j["grid_radius"], "grid_radius");
    if (!(c.grid_radius > 0.0 && c.grid_radius <= 0.8))
      throw ConfigError(ConfigErrorCode::invalid_value, "grid_radius", "field 'grid_radius' must lie in (0, 0.8]");
  }
  return c;
}

inline ExperimentConfig parse_config(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(ConfigErrorCode::parse_error, "", std::string("invalid JSON: ") + e.what());
  }
  return parse_config_json(j);
}

inline nlohmann::json ExperimentConfig::to_json() const {
  nlohmann::json j;
  j["command"] = std::string(hplab::to_string(command));
  j["n"] = params.n;
  j["m"] = params.m;
  j["delta"] = {params.delta.real(), params.delta.imag()};
  j["samples"] = samples;
  j["seed"] = seed;
  j["sampler"] = std::string(hplab::to_string(sampler));
  j["mh"] = {{"burn_in", mh.burn_in}, {"thinning", mh.thinning}, {"chains", mh.chains}};
  j["cells"] = {{"rings", cells.rings}, {"sectors", cells.sectors}, {"r_max", cells.r_max}};
  j["output_dir"] = output_dir;
  j["level"] = level;
  j["workers"] = workers;
  j["source"] = source == SampleSource::truncation ? "truncation" : "projection";
  if (predict_delta) j["predict_delta"] = {predict_delta->real(), predict_delta->imag()};
  j["tuples"] = tuples;
  j["max_points"] = max_points;
  j["n_list"] = n_list;
  j["grid_radius"] = grid_radius;
  return j;
}

}  // namespace hplab

#endif  // HPLAB_CONFIG_HPP
