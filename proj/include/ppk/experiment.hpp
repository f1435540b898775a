#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace ppk {

struct ExperimentConfig {
  std::string command = "decompose"; // decompose, norms, kernel, atoms, divcurl, sweep
  std::string wavelet = "haar";
  int n = 1;
  double p = 0.95;
  int jmin = 0;
  int jmax = 5;
  int K = 0;              // output / sampling grid level; 0 picks a default per command
  std::int64_t span = 1;  // box is [0, span 2^-jmin)^n
  std::uint64_t seed = 1;
  int trials = 10;
  int entries = 100;      // random-field draws per field
  std::string format = "json";
  int threads = 1;
};

// Throws UsageError whose message starts with the offending field name.
void validate(const ExperimentConfig& cfg);
// K after the per-command default has been applied.
int effective_level(const ExperimentConfig& cfg);
nlohmann::json to_json(const ExperimentConfig& cfg);

struct Check {
  std::string name;      // invariant under test
  double value = 0;
  double tolerance = 0;
  std::string relation;  // "<=", ">=", "in"
  double upper = 0;      // second bound for "in"
  bool hard = true;      // soft checks are reported but never fail the run
  bool passed = false;
};

struct RunReport {
  nlohmann::json config;
  std::vector<Check> checks;
  nlohmann::json results;
  std::string version;

  bool passed() const;
  nlohmann::json to_json() const;
  std::string to_csv() const;
};

// Per-trial seeds: the first 2 * trials outputs of SplitMix64(seed), two per trial.
std::vector<std::uint64_t> trial_seeds(std::uint64_t seed, int trials);

RunReport run(const ExperimentConfig& cfg);

std::string library_version();

} // namespace ppk
