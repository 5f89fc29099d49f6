// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The SafeSieve Authors

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

#include "safesieve/config.hpp"
#include "safesieve/simulator.hpp"

namespace safesieve {

/// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;     ///< a module reported an error
inline constexpr int kExitViolation = 2; ///< bad arguments or a failed self-check

/// Scenario of replicate `seed` described by the config.
Scenario build_scenario(const RunConfig &cfg, std::uint64_t seed, bool with_adversaries);

/// Trial settings from the config; the episode stream seed is left at 0.
TrialConfig trial_config(const RunConfig &cfg);

/// metrics.csv, events.jsonl and summary.json in cfg.output_dir.
int cmd_simulate(const RunConfig &cfg, std::ostream &log);

/// report.json plus metrics.csv/events.jsonl per strategy.
int cmd_compare(const RunConfig &cfg, const std::vector<PruneStrategy> &strategies,
                std::ostream &log);

struct OracleCheckOptions {
  std::size_t n_max = 7;
  std::size_t seeds = 100;
  std::uint64_t root_seed = 1;
  std::optional<std::filesystem::path> output_dir;
};

/// Heuristic-vs-exact sweep over random instances with 4..n_max nodes.
int cmd_oracle_check(const OracleCheckOptions &opts, std::ostream &log);

/// Single SafeSieve run dumping the score matrices at each prune event.
int cmd_prune_demo(const RunConfig &cfg, std::ostream &log);

} // namespace safesieve
