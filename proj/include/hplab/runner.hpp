#ifndef HPLAB_RUNNER_HPP
#define HPLAB_RUNNER_HPP

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <openssl/evp.h>

#include "json.hpp"

#include "hplab/config.hpp"
#include "hplab/dpp.hpp"
#include "hplab/orthopoly.hpp"
#include "hplab/truncation.hpp"

namespace hplab {

inline constexpr const char* kVersion = "1.0.0";

/// 17 significant digits, enough to round-trip any double.
inline std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256: digest failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string sha256_file(const std::filesystem::path& p) { return sha256_hex(read_file(p)); }

// ---------------------------------------------------------------------------
// Writers. Column orders are fixed; see README.

inline std::string points_csv(const std::vector<PointConfiguration>& configs) {
  std::string out = "sample_index,point_index,re,im\n";
  for (std::size_t s = 0; s < configs.size(); ++s)
    for (std::size_t i = 0; i < configs[s].points.size(); ++i) {
      const Complex z = configs[s].points[i];
      out += std::to_string(s) + ',' + std::to_string(i) + ',' + fmt17(z.real()) + ',' + fmt17(z.imag()) + '\n';
    }
  return out;
}

/// Row j holds the coefficients of z^j in P_0 .. P_{n-1}.
inline std::string basis_csv(const PolynomialBasis& b) {
  std::string out = "n,m,delta_re,delta_im\n";
  out += std::to_string(b.n) + ',' + std::to_string(b.params.m) + ',' + fmt17(b.params.delta.real()) + ',' +
         fmt17(b.params.delta.imag()) + '\n';
  out += "degree";
  for (int k = 0; k < b.n; ++k) out += ",P" + std::to_string(k) + "_re,P" + std::to_string(k) + "_im";
  out += '\n';
  for (int j = 0; j < b.n; ++j) {
    out += std::to_string(j);
    for (int k = 0; k < b.n; ++k) out += ',' + fmt17(b.coeffs(j, k).real()) + ',' + fmt17(b.coeffs(j, k).imag());
    out += '\n';
  }
  return out;
}

inline std::string convergence_csv(const std::vector<ConvergenceRow>& rows, int m, Complex delta) {
  std::string out = "n,sup_error,grid_size,m,delta_re,delta_im\n";
  for (const auto& r : rows)
    out += std::to_string(r.n) + ',' + fmt17(r.sup_error) + ',' + std::to_string(r.grid_size) + ',' +
           std::to_string(m) + ',' + fmt17(delta.real()) + ',' + fmt17(delta.imag()) + '\n';
  return out;
}

inline std::string gauge_csv(const GaugeSuiteResult& g) {
  std::string out = "tuple_index,size,relative_error\n";
  for (std::size_t i = 0; i < g.errors.size(); ++i)
    out += std::to_string(i) + ',' + std::to_string(g.sizes[i]) + ',' + fmt17(g.errors[i]) + '\n';
  return out;
}

inline nlohmann::json to_json(const CorrelationReport& r, const CellPartition& cells) {
  using nlohmann::json;
  json j;
  j["samples"] = r.samples;
  j["level"] = r.level;
  j["threshold"] = r.threshold;
  j["expected_total"] = r.expected_total;
  j["max_abs_z"] = r.max_abs_z;
  j["pass"] = r.pass;
  json cj = json::array();
  for (const auto& c : cells.cells) cj.push_back({{"r_lo", c.r_lo}, {"r_hi", c.r_hi}, {"theta_lo", c.th_lo}, {"theta_hi", c.th_hi}});
  j["cells"] = cj;
  auto stat = [](const CellStatistic& s) {
    return json{{"a", s.a}, {"b", s.b}, {"expected", s.expected}, {"mean", s.mean}, {"se", s.se}, {"z", s.z}};
  };
  j["first_moments"] = json::array();
  for (const auto& s : r.first) j["first_moments"].push_back(stat(s));
  j["second_moments"] = json::array();
  for (const auto& s : r.second) j["second_moments"].push_back(stat(s));
  return j;
}

// ---------------------------------------------------------------------------
// Run

/// Failure of a pipeline stage, carrying the process exit code.
class RunError : public std::runtime_error {
 public:
  RunError(int exit_code, std::string stage, const std::string& msg)
      : std::runtime_error("stage '" + stage + "': " + msg), exit_code_(exit_code), stage_(std::move(stage)) {}
  int exit_code() const { return exit_code_; }
  const std::string& stage() const { return stage_; }

 private:
  int exit_code_;
  std::string stage_;
};

inline constexpr int kExitPass = 0;
inline constexpr int kExitStatistical = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

struct RunManifest {
  nlohmann::json config;
  std::string version = kVersion;
  double wall_clock_seconds = 0.0;
  std::vector<std::pair<std::string, double>> stage_seconds;
  struct Output {
    std::string file;
    std::uintmax_t bytes = 0;
    std::string sha256;
  };
  std::vector<Output> outputs;
  bool pass = true;
  int exit_code = kExitPass;
  std::string summary;
  nlohmann::json metrics = nlohmann::json::object();

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["version"] = version;
    j["config"] = config;
    j["wall_clock_seconds"] = wall_clock_seconds;
    j["stages"] = nlohmann::json::array();
    for (const auto& [name, sec] : stage_seconds) j["stages"].push_back({{"name", name}, {"seconds", sec}});
    j["outputs"] = nlohmann::json::array();
    for (const auto& o : outputs) j["outputs"].push_back({{"file", o.file}, {"bytes", o.bytes}, {"sha256", o.sha256}});
    j["summary"] = {{"pass", pass}, {"exit_code", exit_code}, {"message", summary}, {"metrics", metrics}};
    return j;
  }
};

/// Recomputes every listed checksum; false on any mismatch or missing file.
inline bool verify_manifest(const std::filesystem::path& dir, const nlohmann::json& manifest) {
  for (const auto& o : manifest.at("outputs")) {
    const auto p = dir / o.at("file").get<std::string>();
    if (!std::filesystem::exists(p)) return false;
    if (sha256_file(p) != o.at("sha256").get<std::string>()) return false;
  }
  return true;
}

namespace detail {

class Pipeline {
 public:
  explicit Pipeline(const ExperimentConfig& cfg) : cfg_(cfg), dir_(cfg.output_dir) {
    manifest_.config = cfg.to_json();
  }

  template <class F>
  auto stage(const std::string& name, F&& f) {
    const auto t0 = std::chrono::steady_clock::now();
    auto record = [&] {
      manifest_.stage_seconds.emplace_back(
          name, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    };
    try {
      if constexpr (std::is_void_v<decltype(f())>) {
        f();
        record();
      } else {
        auto r = f();
        record();
        return r;
      }
    } catch (const RunError&) {
      throw;
    } catch (const NumericalError& e) {
      throw RunError(kExitNumerical, name, e.what());
    } catch (const std::invalid_argument& e) {
      throw RunError(kExitConfig, name, e.what());
    } catch (const std::filesystem::filesystem_error& e) {
      throw RunError(kExitConfig, name, e.what());
    } catch (const std::exception& e) {
      throw RunError(kExitNumerical, name, e.what());
    }
  }

  void write(const std::string& file, const std::string& content) {
    stage("write " + file, [&] {
      std::filesystem::create_directories(dir_);
      const auto p = dir_ / file;
      {
        std::ofstream out(p, std::ios::binary | std::ios::trunc);
        if (!out) throw std::filesystem::filesystem_error("cannot open for writing", p, std::make_error_code(std::errc::io_error));
        out << content;
        if (!out) throw std::filesystem::filesystem_error("write failed", p, std::make_error_code(std::errc::io_error));
      }
      const std::string digest = sha256_file(p);
      if (digest != sha256_hex(content))
        throw std::filesystem::filesystem_error("checksum mismatch after write", p, std::make_error_code(std::errc::io_error));
      manifest_.outputs.push_back({file, std::filesystem::file_size(p), digest});
    });
  }

  void fail_statistically(const std::string& why) {
    manifest_.pass = false;
    manifest_.exit_code = kExitStatistical;
    manifest_.summary = why;
  }

  RunManifest& manifest() { return manifest_; }
  const ExperimentConfig& cfg() const { return cfg_; }

 private:
  const ExperimentConfig& cfg_;
  std::filesystem::path dir_;
  RunManifest manifest_;
};

inline std::vector<PointConfiguration> draw_ensemble(Pipeline& pl, const PolynomialBasis* basis) {
  const auto& c = pl.cfg();
  const RngStream rng(c.seed, 0);
  if (c.source == SampleSource::projection) {
    require(basis != nullptr, "projection sampling needs a basis");
    return pl.stage("sample projection-dpp",
                    [&] { return sample_projection_dpp_ensemble(*basis, c.samples, rng, c.workers); });
  }
  return pl.stage("sample truncation",
                  [&] { return sample_truncation_ensemble(c.params, c.samples, c.sampler, rng, c.mh, c.workers); });
}

inline nlohmann::json ensemble_summary(const std::vector<PointConfiguration>& configs) {
  double sum = 0.0, rmax = 0.0;
  for (const auto& cfg : configs) {
    sum += cfg.sum_abs2();
    for (const auto& z : cfg.points) rmax = std::max(rmax, std::abs(z));
  }
  return {{"configurations", configs.size()},
          {"mean_sum_abs2", sum / static_cast<double>(configs.size())},
          {"max_modulus", rmax}};
}

}  // namespace detail

/// Runs the configured pipeline, writes its outputs and manifest.json into
/// output_dir and returns the manifest. Stage failures surface as RunError.
inline RunManifest run(const ExperimentConfig& c) {
  using nlohmann::json;
  const auto t0 = std::chrono::steady_clock::now();
  detail::Pipeline pl(c);
  json report;
  report["command"] = std::string(to_string(c.command));

  switch (c.command) {
    case Command::sample: {
      std::optional<PolynomialBasis> basis;
      if (c.source == SampleSource::projection)
        basis = pl.stage("basis", [&] { return orthonormal_basis(c.params.n, c.params.m, c.params.delta); });
      const auto configs = detail::draw_ensemble(pl, basis ? &*basis : nullptr);
      pl.write("points.csv", points_csv(configs));
      report["ensemble"] = detail::ensemble_summary(configs);
      report["normalization_constant"] = "unavailable";
      pl.manifest().summary = "sampled " + std::to_string(configs.size()) + " configurations";
      break;
    }
    case Command::basis: {
      const auto g = pl.stage("gram", [&] { return gram_matrix(c.params.n, c.params.m, c.params.delta); });
      const auto b = pl.stage("basis", [&] { return orthonormal_basis(g); });
      pl.write("basis.csv", basis_csv(b));
      report["orthonormality_residual"] = b.orthonormality_residual(g);
      if (c.params.delta == Complex{0.0, 0.0}) {
        const auto cf = closed_form_basis_delta0(c.params.n, c.params.m);
        report["closed_form_max_abs_diff"] = (b.coeffs - cf.coeffs).cwiseAbs().maxCoeff();
      }
      pl.manifest().summary = "basis built";
      break;
    }
    case Command::verify_dpp: {
      const Complex predicted = c.predict_delta.value_or(c.params.delta);
      const auto sample_basis =
          pl.stage("basis", [&] { return orthonormal_basis(c.params.n, c.params.m, c.params.delta); });
      const auto pred_basis = predicted == c.params.delta
                                  ? sample_basis
                                  : pl.stage("predicted basis",
                                             [&] { return orthonormal_basis(c.params.n, c.params.m, predicted); });
      const auto spec = KernelSpec::finite(pred_basis);
      const auto cells = pl.stage("cells", [&] {
        const WeightSpec w{WeightKind::hp, c.params.m, predicted};
        return equal_mass_partition(
            [&](Complex z) { return std::abs(z) < 1.0 ? pred_basis.evaluate(z).squaredNorm() * weight_eval(w, z) : 0.0; },
            c.cells.r_max, c.cells.rings, c.cells.sectors);
      });
      const auto configs = detail::draw_ensemble(pl, &sample_basis);
      pl.write("points.csv", points_csv(configs));
      pl.write("basis.csv", basis_csv(pred_basis));
      const auto rep = pl.stage("verify", [&] { return verify_intensities(configs, spec, cells, c.level); });
      report["verification"] = to_json(rep, cells);
      report["ensemble"] = detail::ensemble_summary(configs);
      pl.manifest().metrics = {{"max_abs_z", rep.max_abs_z}, {"threshold", rep.threshold}};
      if (rep.pass)
        pl.manifest().summary = "all cell statistics within the Bonferroni threshold";
      else
        pl.fail_statistically("cell statistic exceeds the Bonferroni threshold (max |z| " + fmt17(rep.max_abs_z) + ")");
      break;
    }
    case Command::gauge_check: {
      RngStream rng(c.seed, 0);
      const auto g = pl.stage("gauge", [&] {
        return gauge_identity_suite(c.params.m, c.params.delta, c.tuples, c.max_points, rng);
      });
      pl.write("gauge.csv", gauge_csv(g));
      report["tuples"] = g.tuples;
      report["degenerate"] = g.degenerate;
      report["max_relative_error"] = g.max_relative_error;
      report["tolerance"] = 1e-10;
      pl.manifest().metrics = {{"max_relative_error", g.max_relative_error}};
      if (g.max_relative_error <= 1e-10)
        pl.manifest().summary = "gauge identity holds on all tuples";
      else
        pl.fail_statistically("gauge identity violated (max relative error " + fmt17(g.max_relative_error) + ")");
      break;
    }
    case Command::converge: {
      const auto grid = tensor_grid(default_convergence_points(c.grid_radius));
      const auto rows = pl.stage("converge", [&] { return convergence_profile(c.params.m, c.params.delta, c.n_list, grid); });
      const auto v = assess_convergence(rows, c.params.m, c.params.delta, grid);
      pl.write("convergence.csv", convergence_csv(rows, c.params.m, c.params.delta));
      report["strictly_decreasing"] = v.strictly_decreasing;
      report["min_abs_limit"] = v.min_abs_limit;
      report["max_abs_limit"] = v.max_abs_limit;
      report["final_relative_error_to_min"] = v.final_relative_to_min;
      report["final_relative_error"] = v.final_relative;
      report["tolerance"] = 1e-3;
      pl.manifest().metrics = {{"final_relative_error", v.final_relative}, {"strictly_decreasing", v.strictly_decreasing}};
      if (v.pass)
        pl.manifest().summary = "sup error strictly decreasing and within tolerance";
      else
        pl.fail_statistically(std::string(v.strictly_decreasing ? "" : "sup error not strictly decreasing; ") +
                              "final relative error " + fmt17(v.final_relative));
      break;
    }
  }

  report["pass"] = pl.manifest().pass;
  pl.write("report.json", report.dump(2) + "\n");
  auto& m = pl.manifest();
  m.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  {
    const auto p = std::filesystem::path(c.output_dir) / "manifest.json";
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    out << m.to_json().dump(2) << "\n";
    if (!out) throw RunError(kExitConfig, "write manifest.json", "cannot write " + p.string());
  }
  return m;
}

}  // namespace hplab

#endif  // HPLAB_RUNNER_HPP
