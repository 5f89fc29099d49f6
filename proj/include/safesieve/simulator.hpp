// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The SafeSieve Authors

#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "safesieve/engine.hpp"
#include "safesieve/episode.hpp"
#include "safesieve/graph.hpp"
#include "safesieve/rng.hpp"
#include "safesieve/scoring.hpp"

namespace safesieve {

/// Stand-in for an LLM agent.
struct SyntheticAgent {
  AgentId id;
  double quality = 1.0; ///< in [0,1]
  bool malicious = false;
  std::uint32_t tokens_lo = 200; ///< tokens per outgoing message, inclusive range
  std::uint32_t tokens_hi = 400;
  double cost_per_kilotoken = 0.1; ///< cents
  std::string tier;
};

struct WorldConfig {
  double base_acc = 0.5;
  double gain = 0.8;
  double malice_penalty = 0.6;
  std::uint32_t rounds_per_episode = 2;
  double clamp_low = 0.02;
  double clamp_high = 0.98;
  std::uint64_t seed = 0;

  void validate() const;
  friend bool operator==(const WorldConfig &, const WorldConfig &) = default;
};

/// Cost tier applied to an agent: name, price and message size range.
struct CostTier {
  std::string name;
  double cost_per_kilotoken;
  std::uint32_t tokens_lo;
  std::uint32_t tokens_hi;
};

/// Five tiers from one expensive coordinator down to small cheap models.
const std::vector<CostTier> &default_cost_tiers();

/// Clamped linear success model: base + gain * H - penalty * malicious share.
double success_probability(const CommunicationGraph &g, std::span<const SyntheticAgent> agents,
                           const WorldConfig &world);

/// One episode: draws success first, then which agents engage, then message
/// sizes, so the success draw is shared by every graph run on the same stream.
EpisodeResult run_episode(const CommunicationGraph &g, std::span<const SyntheticAgent> agents,
                          const WorldConfig &world, Rng &rng);

/// Marks the `count` highest-id agents malicious with the given quality.
std::vector<SyntheticAgent> inject_adversary(std::vector<SyntheticAgent> agents,
                                             std::size_t count, double quality_override);

/// Agents, role profiles and the expert scorer that judges them.
struct Scenario {
  std::vector<SyntheticAgent> agents;
  std::vector<AgentProfile> profiles;
  std::shared_ptr<const CompatibilityScorer> scorer;
  /// Planted cluster per agent, when the scenario has one.
  std::vector<std::size_t> cluster_of;
};

struct BenignWorldOptions {
  std::size_t agents = 8;
  double quality_lo = 0.95;
  double quality_hi = 1.0;
  std::size_t embedding_dim = 16;
  /// Weight of the shared embedding direction; sets the typical cosine.
  double shared_weight = 0.85;
  SyntheticScorer::Band benign_band{0.6, 1.0};
  SyntheticScorer::Band suspicious_band{0.0, 0.4};
};

/// Default benign world with heterogeneous cost tiers. The expert scorer sees
/// through any agent already marked malicious.
Scenario make_benign_world(const BenignWorldOptions &opts, std::uint64_t seed);

/// Same agents and embeddings with `count` adversaries injected and an expert
/// scorer that flags them.
Scenario with_adversaries(const Scenario &clean, const BenignWorldOptions &opts,
                          std::size_t count, double quality, std::uint64_t seed);

/// Agents in `clusters` contiguous groups: intra-cluster cosine near
/// 1 - inter_noise, cross-cluster cosine near inter_noise. The lowest id of
/// each group is its lead; the expert rates lead-teammate pairs highly and
/// scores every other pair at random.
Scenario make_planted_cluster_world(std::size_t n, std::size_t clusters, double intra_quality,
                                    double inter_noise, std::uint64_t seed);

/// Seed of replicate `r` under a root seed; scenarios are built from it.
std::uint64_t replicate_seed(std::uint64_t root, std::uint64_t r);
/// Episode stream of a replicate, shared by every strategy.
std::uint64_t episode_stream_seed(std::uint64_t replicate);

struct TrialConfig {
  ScoringConfig scoring;
  PruneConfig prune;
  WorldConfig world;
  std::uint64_t episodes = 300;
  std::uint64_t batch_size = 10;
};

struct BatchMetrics {
  std::uint64_t batch = 0;
  double accuracy = 0.0;
  std::uint64_t tokens = 0;
  double cost_cents = 0.0;
  std::size_t active_edges = 0;
};

struct TrialMetrics {
  std::vector<BatchMetrics> batches;
  std::uint64_t token_total = 0;
  double cost_total_cents = 0.0;
  std::uint64_t correct = 0;
  std::uint64_t episodes = 0;
  std::vector<std::uint64_t> per_agent_tokens;
  std::vector<double> per_agent_cost;

  double mean_accuracy() const;
  std::vector<double> accuracy_series() const;
};

struct TrialResult {
  PruneStrategy strategy;
  TrialMetrics metrics;
  EngineState final_state;
};

using StepObserver = std::function<void(const EngineState &)>;

/// Runs `cfg.episodes` episodes through the engine. Episode k draws from
/// derive_seed(cfg.world.seed, k), so every strategy sees the same stream.
TrialResult run_trial(const PruneStrategy &strategy, const Scenario &scenario,
                      const TrialConfig &cfg, const StepObserver &observer = {});

struct StrategyReport {
  PruneStrategy strategy;
  double mean_accuracy = 0.0;
  double accuracy_delta = 0.0;          ///< vs the NoPrune reference
  double accuracy_delta_vs_first = 0.0; ///< vs the first listed strategy
  double token_total = 0.0;
  double token_reduction_pct = 0.0; ///< vs the NoPrune reference
  double cost_total_cents = 0.0;
  std::vector<double> cost_per_agent;
  std::optional<double> attacked_accuracy;
  std::optional<double> accuracy_drop; ///< clean minus attacked accuracy
  std::vector<TrialResult> trials;     ///< clean-world trial per replicate
};

struct ComparisonReport {
  std::vector<StrategyReport> strategies;
  StrategyReport reference; ///< NoPrune
  std::size_t replicates = 0;
};

/// Runs every strategy over the same replicate seeds (common random numbers),
/// plus a NoPrune reference. With `attacked`, each strategy also runs on the
/// adversarial scenario of the same replicate to measure its accuracy drop.
ComparisonReport compare_strategies(
    const std::vector<PruneStrategy> &strategies,
    const std::function<Scenario(std::uint64_t)> &clean,
    const std::function<Scenario(std::uint64_t)> &attacked, const TrialConfig &cfg,
    std::uint64_t root_seed, std::size_t replicates);

} // namespace safesieve
