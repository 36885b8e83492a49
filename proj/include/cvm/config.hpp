#pragma once

// Run configuration: flat "section.key = value" text with optional [section]
// headers and '#' comments. Unknown keys are rejected.

#include "cvm/model.hpp"
#include "cvm/rational.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cvm {

/// Any problem with user-supplied configuration. `key` names the offending
/// setting when there is one.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& message)
      : std::runtime_error(message), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

enum class StopMode { Horizon, Absorption, Consensus };

struct RunConfig {
  int opinions = 3;
  int theta = 1;

  std::string density_kind = "uniform";  // uniform | symmetric | explicit
  std::optional<Rational> rho1;
  std::optional<Rational> rho2;
  std::vector<Rational> density_values;

  Topology topology = Topology::Cycle;
  int graph_size = 100;

  double t_max = 100.0;
  std::uint64_t event_budget = 1'000'000'000ULL;
  StopMode stop = StopMode::Horizon;
  std::uint64_t replicates = 100;
  std::optional<std::uint64_t> seed;
  unsigned threads = 0;

  std::vector<double> times;  // empty: geometric grid up to t_max
  std::vector<std::string> quantities{"interface_density"};

  std::string output_directory = "out";
  std::vector<std::string> formats{"csv"};

  std::vector<std::pair<int, int>> pairs{{0, 1}};
  double ld_p = 0.5;
  double ld_epsilon = 0.1;
  std::vector<int> ld_lengths{100, 200, 400};
  int spacetime_rows = 600;
  bool spacetime_interfaces = false;

  /// Every explicitly assigned key with its raw value, in key order.
  std::map<std::string, std::string> assignments;

  Params params() const { return Params(opinions, theta); }
  /// Builds and validates the initial law.
  DensityVector density() const;
  std::shared_ptr<const Graph> graph() const;
  std::vector<double> sample_times() const;
  /// Throws ConfigError unless a seed was given.
  std::uint64_t require_seed() const;
  /// Checks everything that can be checked before sampling.
  void validate() const;
};

std::vector<std::string> known_config_keys();

/// Applies one assignment. Throws ConfigError on an unknown key or bad value.
void apply_setting(RunConfig& config, const std::string& key, const std::string& value);

/// Parses "key=value" as given to --set.
void apply_override(RunConfig& config, const std::string& assignment);

RunConfig parse_config_text(const std::string& text, RunConfig base = {});
RunConfig load_config_file(const std::string& path, RunConfig base = {});

/// "key = value" lines for every explicit assignment, sorted by key.
std::string canonical_text(const RunConfig& config);

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(const std::string& bytes) noexcept;

std::string to_string(StopMode mode);

} // namespace cvm
