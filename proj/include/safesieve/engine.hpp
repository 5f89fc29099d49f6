// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The SafeSieve Authors

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "safesieve/clustering.hpp"
#include "safesieve/episode.hpp"
#include "safesieve/graph.hpp"
#include "safesieve/scoring.hpp"

namespace safesieve {

enum class ThresholdSchedule {
  Literal, ///< constant until the horizon, then grows toward theta_max
  Smooth,  ///< grows from t = 0
};

struct PruneConfig {
  double theta0 = 0.0;
  double theta_max = 0.5;
  double k_rate = 2.0;
  double r = 0.15;     ///< fraction of active edges removed per event
  double r_max = 0.35; ///< cap on the cumulative pruned fraction
  std::uint64_t b_start = 60;
  std::uint64_t prune_interval = 10;
  ThresholdSchedule schedule = ThresholdSchedule::Literal;
  IsolationRule isolation = IsolationRule::Bidirectional;

  /// Throws std::invalid_argument naming the violated constraint.
  void validate(std::uint64_t horizon) const;
  friend bool operator==(const PruneConfig &, const PruneConfig &) = default;
};

struct PruneStrategy {
  enum class Kind { SafeSieve, TopK, Random, NoPrune };

  Kind kind = Kind::SafeSieve;
  /// Per-event fraction for TopK and Random; defaults to PruneConfig::r.
  std::optional<double> fraction;

  static PruneStrategy parse(std::string_view name);
  std::string name() const;
  friend bool operator==(const PruneStrategy &, const PruneStrategy &) = default;
};

struct PruneEvent {
  std::uint64_t t = 0;
  PruneStrategy::Kind strategy = PruneStrategy::Kind::SafeSieve;
  EdgeSet rule_set;
  EdgeSet budget_set;
  std::vector<AgentId> removed_nodes;
  double theta = 0.0;
  NormalizationStats stats;
  std::optional<ClusterAssignment> assignment;
  /// Mean of the normalized scores over the edges they were computed on.
  double normalized_mean = 0.0;
  double beta_hat = 0.0;
  double beta_correction = 1.0;
  std::size_t floored_scores = 0;
  std::size_t active_before = 0;
  std::size_t active_after = 0;
  std::size_t pruned_total = 0;

  std::size_t pruned_count() const { return rule_set.size() + budget_set.size(); }
};

struct EngineState {
  CommunicationGraph graph;
  EdgeScoreMatrix scores;
  HistoryLedger ledger;
  std::uint64_t t = 0;
  std::size_t original_edge_count = 0;
  std::size_t pruned_total = 0;
  double beta_correction = 1.0;
  std::uint64_t seed = 0; ///< drives the Random baseline
  std::vector<PruneEvent> events;

  /// Cumulative pruned fraction of the original edge population.
  double pruned_rate() const;
};

/// Fresh state over the complete graph of the scored agents.
EngineState make_engine_state(EdgeScoreMatrix scores, std::uint64_t seed = 0);

double threshold_at(std::uint64_t t, std::uint64_t horizon, const PruneConfig &cfg);

/// round-half-up of r * active.
std::size_t prune_target(std::size_t active, double r);

bool should_prune(const EngineState &state, const PruneConfig &cfg);

struct PruneSets {
  EdgeSet rule;
  EdgeSet budget;
};

/// Rule tier: cross-cluster edges between non-terminals scoring below theta.
/// Budget tier: lowest normalized scores among the rest until the target.
PruneSets build_prune_set(const EngineState &state, const ClusterAssignment &assignment,
                          double theta, const PruneConfig &cfg);

std::pair<EngineState, PruneEvent> prune_step(EngineState state, const PruneConfig &cfg,
                                              const ScoringConfig &scoring);

/// Greedy baseline: removes the floor(k_frac * active) lowest integrated
/// scores with no clustering or terminal protection.
std::pair<EngineState, PruneEvent> prune_topk(EngineState state, double k_frac,
                                              const PruneConfig &cfg,
                                              const ScoringConfig &scoring);

/// Uniformly random removal of round(fraction * active) edges.
std::pair<EngineState, PruneEvent> prune_random(EngineState state, double fraction,
                                                const PruneConfig &cfg);

/// Records the episode, advances t and prunes with `strategy` when due.
/// Throws std::invalid_argument if the episode used an inactive edge.
EngineState observe_and_step(EngineState state, const EpisodeResult &episode,
                             const PruneStrategy &strategy, const PruneConfig &cfg,
                             const ScoringConfig &scoring);

} // namespace safesieve
