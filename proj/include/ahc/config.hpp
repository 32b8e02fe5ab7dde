#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "ahc/homogenize.hpp"

namespace ahc {

/// Schema violation; `key` is the dotted path of the offending entry (e.g. "medium.lambda").
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& message)
      : std::runtime_error(key + ": " + message), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

enum class ExperimentKind { SweepR, SweepH, Wulff, OffCenter, Recovery, GlueDemo, Oracle1d };

std::string to_string(ExperimentKind kind);
ExperimentKind experiment_kind_from_string(const std::string& name);

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::Oracle1d;
  Vec3 e{1.0, 0.0, 0.0};
  std::vector<std::uint64_t> seeds{1};

  double R = 8.0;
  std::optional<double> h;
  std::vector<double> R_list;
  std::vector<double> h_list;
  std::vector<double> kappas{1.0};

  Vec3 x0{};
  double rho = 1.0;
  std::vector<double> eps_list;
  /// phi(e) used for the recovery reference; defaults to the constant-medium closed form.
  std::optional<double> reference_phi;

  int directions = 16;

  int shells = 0;
  double zeta_threshold = 0.05;

  /// Relative tolerance for oracle comparisons (oracle-1d, recovery).
  double tolerance = 0.01;
};

struct OutputConfig {
  /// Write measured wall times to the CSV; off by default so re-runs are byte-identical.
  bool timing = false;
  /// Dump minimizers (oracle-1d) and glued configurations (glue-demo) as raw grids.
  bool dump_grids = false;
};

struct RunConfig {
  Problem problem;
  ExperimentConfig experiment;
  OutputConfig output;
};

RunConfig parse_config(const nlohmann::json& root);
RunConfig load_config(const std::filesystem::path& path);

/// Replace the seed list (and the medium seed) by a single seed.
void override_seed(RunConfig& config, std::uint64_t seed);

}  // namespace ahc
