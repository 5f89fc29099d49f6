// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The SafeSieve Authors

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "safesieve/engine.hpp"
#include "safesieve/scoring.hpp"
#include "safesieve/simulator.hpp"

namespace safesieve {

/// Raised for unreadable, malformed or out-of-range configuration. The
/// message names the offending key and its constraint.
class ConfigError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

enum class ScenarioKind { Benign, Planted };

struct ScenarioConfig {
  ScenarioKind kind = ScenarioKind::Benign;
  std::size_t agents = 8;
  std::size_t adversaries = 0;
  double adversary_quality = 0.0;
  double quality_lo = 0.95;
  double quality_hi = 1.0;
  std::size_t clusters = 2;
  double inter_noise = 0.4;

  friend bool operator==(const ScenarioConfig &, const ScenarioConfig &) = default;
};

struct RunConfig {
  ScoringConfig scoring;
  PruneConfig prune;
  WorldConfig world;
  PruneStrategy strategy;
  ScenarioConfig scenario;
  std::optional<std::filesystem::path> agents_file;
  std::optional<std::filesystem::path> expert_scores_file;
  std::filesystem::path output_dir = "out";
  std::uint64_t seed = 1;
  std::uint64_t episodes = 300;
  std::uint64_t batch_size = 10;
  std::size_t replicates = 1;

  /// Throws ConfigError if any sub-config violates its invariants.
  void validate() const;
  friend bool operator==(const RunConfig &, const RunConfig &) = default;
};

/// Every accepted key, in emission order.
const std::vector<std::string> &config_keys();

/// Parses a config file. Keys are flat and dotted (`prune.theta0: 0.1`);
/// nested maps and JSON documents are flattened to the same keys. Missing
/// keys take defaults: scoring.horizon follows episodes and prune.b_start
/// follows horizon / 5.
RunConfig load_config(const std::filesystem::path &path);
RunConfig parse_config(std::string_view text);

/// Flat dotted-key YAML accepted by load_config.
std::string emit_config(const RunConfig &cfg);

} // namespace safesieve
