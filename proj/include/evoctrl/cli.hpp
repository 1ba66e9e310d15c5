#pragma once

#include "evoctrl/ocp.hpp"

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace evoctrl {

class ConfigError : public Error {
public:
  using Error::Error;
};

/// Flat `key = value` configuration. `experiment` picks the parameter set
/// (heat, heat5, wave, custom); every other key overrides a default.
/// Lines starting with '#' and blank lines are ignored.
struct ExperimentConfig {
  std::string experiment = "heat";
  std::map<std::string, std::string> overrides;

  static ExperimentConfig from_text(const std::string &text);
  static ExperimentConfig from_file(const std::string &path);
  /// `key=value`; `experiment` replaces the experiment name.
  void set(const std::string &assignment);
  void set(const std::string &key, const std::string &value);
  /// Throws ConfigError for unknown experiments, keys not accepted by the
  /// experiment, and values that do not parse.
  void validate() const;

  double number(const std::string &key, double fallback) const;
  Index integer(const std::string &key, Index fallback) const;
  std::string text(const std::string &key, const std::string &fallback) const;
  bool has(const std::string &key) const { return overrides.count(key) > 0; }
};

/// Keys accepted by an experiment, `experiment` included.
std::vector<std::string> accepted_keys(const std::string &experiment);

struct ExperimentReport {
  std::string experiment;
  OptResult result;
  std::vector<std::pair<std::string, double>> metrics;
  double runtime = 0.0;
  std::string out_dir; // empty when no artifacts were written

  double metric(const std::string &name) const;
};

/// Solves the configured problem and writes the artifacts into `out`
/// (default `out/<experiment>`; `out = none` writes nothing).
ExperimentReport run_experiment(const ExperimentConfig &config);

/// Mesh vertices and triangles for the wave domain.
void write_mesh(Index n, const std::string &dir);

struct CheckResult {
  std::string name;
  double residual;
  double tolerance;
  bool passed;
};

struct CheckOptions {
  std::uint64_t seed = 1;
  /// Test hook: the duality check runs against an adjoint with one flipped sign.
  bool corrupt_adjoint = false;
};

std::vector<CheckResult> check_suite(const CheckOptions &options);
/// One line per check; the text depends only on the results.
void write_check_report(std::ostream &os, const std::vector<CheckResult> &results);

/// Random instance with SPD M, Wu, Wy and a stable pencil (M, A).
DescriptorSystem random_system(std::mt19937_64 &rng, Index n, Index m, Index p);
IntervalTrajectory random_trajectory(std::mt19937_64 &rng, const TimeGrid &grid, Index width);
Vec random_vector(std::mt19937_64 &rng, Index n);

} // namespace evoctrl
