// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The SafeSieve Authors

#include "safesieve/engine.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <tuple>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "safesieve/rng.hpp"

namespace safesieve {

void PruneConfig::validate(std::uint64_t horizon) const {
  auto fail = [](const char *what) { throw std::invalid_argument(what); };
  if (!(theta0 >= 0.0)) fail("prune.theta0 must satisfy theta0 ≥ 0");
  if (!(theta_max > theta0)) fail("prune.theta_max must satisfy theta_max > theta0");
  if (!(k_rate > 0.0)) fail("prune.k_rate must satisfy k_rate > 0");
  if (!(r > 0.0 && r < 1.0)) fail("prune.r must satisfy r ∈ (0,1)");
  if (!(r_max > 0.0 && r_max <= 1.0)) fail("prune.r_max must satisfy r_max ∈ (0,1]");
  if (prune_interval == 0) fail("prune.prune_interval must satisfy prune_interval > 0");
  if (b_start >= horizon) fail("prune.b_start must satisfy b_start < scoring.horizon");
}

PruneStrategy PruneStrategy::parse(std::string_view name) {
  if (name == "safesieve") return {Kind::SafeSieve, std::nullopt};
  if (name == "topk") return {Kind::TopK, std::nullopt};
  if (name == "random") return {Kind::Random, std::nullopt};
  if (name == "noprune") return {Kind::NoPrune, std::nullopt};
  throw std::invalid_argument(fmt::format(
      "unknown strategy '{}' (valid: safesieve, topk, random, noprune)", name));
}

std::string PruneStrategy::name() const {
  switch (kind) {
  case Kind::SafeSieve: return "safesieve";
  case Kind::TopK: return "topk";
  case Kind::Random: return "random";
  case Kind::NoPrune: return "noprune";
  }
  return "unknown";
}

double EngineState::pruned_rate() const {
  if (original_edge_count == 0) return 0.0;
  return static_cast<double>(pruned_total) / static_cast<double>(original_edge_count);
}

EngineState make_engine_state(EdgeScoreMatrix scores, std::uint64_t seed) {
  EngineState state;
  const std::size_t n = scores.semantic.size();
  state.graph = new_complete_graph(n);
  state.scores = std::move(scores);
  state.ledger = HistoryLedger(n);
  state.original_edge_count = state.graph.active_edge_count();
  state.seed = seed;
  return state;
}

double threshold_at(std::uint64_t t, std::uint64_t horizon, const PruneConfig &cfg) {
  const double frac = static_cast<double>(t) / static_cast<double>(horizon);
  const double x = cfg.schedule == ThresholdSchedule::Literal ? std::max(frac - 1.0, 0.0) : frac;
  return cfg.theta0 + (cfg.theta_max - cfg.theta0) * (1.0 - std::exp(-cfg.k_rate * x));
}

std::size_t prune_target(std::size_t active, double r) {
  return static_cast<std::size_t>(std::floor(r * static_cast<double>(active) + 0.5));
}

bool should_prune(const EngineState &state, const PruneConfig &cfg) {
  if (state.t < cfg.b_start) return false;
  if (state.pruned_rate() >= cfg.r_max) return false;
  if (state.t % cfg.prune_interval != 0) return false;
  const std::size_t active = state.graph.active_edge_count();
  return active >= 2 && prune_target(active, cfg.r) >= 1;
}

namespace {

// Edges ordered by (score, from, to).
void sort_by_score(EdgeSet &edges, const SquareMatrix<double> &score) {
  std::sort(edges.begin(), edges.end(), [&](const Edge &a, const Edge &b) {
    return std::tie(score(a), a.from, a.to) < std::tie(score(b), b.from, b.to);
  });
}

// Mask and node update shared by every strategy.
void apply_prune(EngineState &state, PruneEvent &event, const PruneConfig &cfg) {
  EdgeSet prune = event.rule_set;
  prune.insert(prune.end(), event.budget_set.begin(), event.budget_set.end());
  state.graph = apply_prune_mask(state.graph, prune);
  auto [graph, removed] = drop_isolated_nodes(state.graph, cfg.isolation);
  const std::size_t before_drop = state.graph.active_edge_count();
  state.graph = std::move(graph);
  // Only out-degree isolation can take further edges with a removed node.
  state.pruned_total += prune.size() + (before_drop - state.graph.active_edge_count());
  event.removed_nodes = std::move(removed);
  event.active_after = state.graph.active_edge_count();
  event.pruned_total = state.pruned_total;
}

} // namespace

PruneSets build_prune_set(const EngineState &state, const ClusterAssignment &assignment,
                          double theta, const PruneConfig &cfg) {
  const SquareMatrix<double> &norm = state.scores.normalized;
  EdgeSet active = state.graph.active_edges();
  const std::size_t target = prune_target(active.size(), cfg.r);
  if (target == 0) return {};

  const TerminalSet terminals{assignment.terminals};
  PruneSets out;
  EdgeSet rest;
  for (const Edge &e : active) {
    const auto fi = assignment.f.at(e.from.value());
    const auto fj = assignment.f.at(e.to.value());
    if (!fi || !fj) {
      throw std::invalid_argument(
          fmt::format("prune set: edge ({},{}) has an unassigned endpoint", e.from.index, e.to.index));
    }
    const bool crosses = *fi != *fj;
    const bool protected_end = terminals.contains(e.from) || terminals.contains(e.to);
    if (crosses && !protected_end && norm(e) < theta) {
      out.rule.push_back(e);
    } else {
      rest.push_back(e);
    }
  }
  sort_by_score(out.rule, norm);
  if (out.rule.size() >= target) {
    out.rule.resize(target);
    return out;
  }
  sort_by_score(rest, norm);
  const std::size_t fill = target - out.rule.size();
  out.budget.assign(rest.begin(), rest.begin() + static_cast<std::ptrdiff_t>(fill));
  return out;
}

std::pair<EngineState, PruneEvent> prune_step(EngineState state, const PruneConfig &cfg,
                                              const ScoringConfig &scoring) {
  PruneEvent event;
  event.t = state.t;
  event.strategy = PruneStrategy::Kind::SafeSieve;
  event.theta = threshold_at(state.t, scoring.horizon, cfg);
  event.beta_correction = state.beta_correction;
  event.pruned_total = state.pruned_total;

  const EdgeSet before = state.graph.active_edges();
  event.active_before = before.size();
  event.active_after = before.size();
  if (prune_target(before.size(), cfg.r) == 0) {
    state.events.push_back(event);
    return {std::move(state), std::move(event)};
  }

  // (1) integrated scores, (2) normalization over the pre-prune edges.
  refresh_integrated_scores(state.scores, state.ledger, before, state.t, scoring,
                            state.beta_correction);
  auto [normalized, stats] = normalize_scores(state.scores, before, scoring.epsilon);
  state.scores.normalized = std::move(normalized);
  double sum = 0.0;
  for (const Edge &e : before) sum += state.scores.normalized(e);
  event.normalized_mean = sum / static_cast<double>(before.size());

  // (3) clusters from raw-score distances.
  const TerminalSet terminals = select_terminals(state.scores, state.graph, scoring.epsilon);
  const DistanceMetric metric =
      build_distances(state.scores, state.graph, scoring.epsilon, NegativeScorePolicy::Floor);
  if (metric.floored > 0) {
    spdlog::warn("t={}: floored {} non-positive edge scores before building distances", state.t,
                 metric.floored);
  }
  event.floored_scores = metric.floored;
  ClusterAssignment assignment = assign_clusters(state.graph, terminals, metric);

  // (4) prune sets against the threshold, (5-6) mask and node update.
  PruneSets sets = build_prune_set(state, assignment, event.theta, cfg);
  event.rule_set = std::move(sets.rule);
  event.budget_set = std::move(sets.budget);
  event.assignment = std::move(assignment);
  apply_prune(state, event, cfg);

  // (7) rescale the historical weight by the score range ratio.
  const EdgeSet after = state.graph.active_edges();
  stats.range_after = score_range(state.scores.integrated, after);
  event.stats = stats;
  const double frac =
      std::min(1.0, static_cast<double>(state.t) / static_cast<double>(scoring.horizon));
  const double beta_scheduled = scoring.beta0 + (scoring.beta_max - scoring.beta0) * frac;
  const double ratio = stats.range_before / (stats.range_after + scoring.epsilon);
  if (stats.range_before > 0.0 && stats.range_after > 0.0 && std::isfinite(ratio)) {
    state.beta_correction *= ratio;
  } else {
    spdlog::warn("t={}: degenerate score range ({} -> {}), beta left unchanged", state.t,
                 stats.range_before, stats.range_after);
  }
  event.beta_correction = state.beta_correction;
  event.beta_hat = beta_scheduled * state.beta_correction;

  state.events.push_back(event);
  return {std::move(state), std::move(event)};
}

std::pair<EngineState, PruneEvent> prune_topk(EngineState state, double k_frac,
                                              const PruneConfig &cfg,
                                              const ScoringConfig &scoring) {
  if (!(k_frac > 0.0 && k_frac < 1.0)) {
    throw std::invalid_argument("top-k: k_frac must lie in (0,1)");
  }
  PruneEvent event;
  event.t = state.t;
  event.strategy = PruneStrategy::Kind::TopK;
  event.beta_correction = state.beta_correction;
  event.pruned_total = state.pruned_total;

  EdgeSet active = state.graph.active_edges();
  event.active_before = active.size();
  event.active_after = active.size();
  const auto count = static_cast<std::size_t>(std::floor(k_frac * static_cast<double>(active.size())));
  if (count > 0) {
    refresh_integrated_scores(state.scores, state.ledger, active, state.t, scoring,
                              state.beta_correction);
    sort_by_score(active, state.scores.integrated);
    event.budget_set.assign(active.begin(), active.begin() + static_cast<std::ptrdiff_t>(count));
    apply_prune(state, event, cfg);
  }
  state.events.push_back(event);
  return {std::move(state), std::move(event)};
}

std::pair<EngineState, PruneEvent> prune_random(EngineState state, double fraction,
                                                const PruneConfig &cfg) {
  PruneEvent event;
  event.t = state.t;
  event.strategy = PruneStrategy::Kind::Random;
  event.beta_correction = state.beta_correction;
  event.pruned_total = state.pruned_total;

  EdgeSet active = state.graph.active_edges();
  event.active_before = active.size();
  event.active_after = active.size();
  const std::size_t count = prune_target(active.size(), fraction);
  if (count > 0) {
    Rng rng = make_rng(derive_seed(derive_seed(state.seed, stream_tag("random-prune")), state.t));
    std::shuffle(active.begin(), active.end(), rng);
    event.budget_set.assign(active.begin(), active.begin() + static_cast<std::ptrdiff_t>(count));
    std::sort(event.budget_set.begin(), event.budget_set.end());
    apply_prune(state, event, cfg);
  }
  state.events.push_back(event);
  return {std::move(state), std::move(event)};
}

EngineState observe_and_step(EngineState state, const EpisodeResult &episode,
                             const PruneStrategy &strategy, const PruneConfig &cfg,
                             const ScoringConfig &scoring) {
  for (const Edge &e : episode.active_edges_used) {
    if (!state.graph.has_edge(e)) {
      throw std::invalid_argument(
          fmt::format("episode references inactive edge ({},{})", e.from.index, e.to.index));
    }
  }
  const EdgeSet credited = credited_edges(episode.active_edges_used, episode.answerer,
                                          scoring.credit_policy, state.graph.size());
  record_episode_outcome(state.ledger, credited, episode.correct);
  state.t += 1;

  if (strategy.kind == PruneStrategy::Kind::NoPrune || !should_prune(state, cfg)) {
    return state;
  }
  const double fraction = strategy.fraction.value_or(cfg.r);
  switch (strategy.kind) {
  case PruneStrategy::Kind::SafeSieve:
    return prune_step(std::move(state), cfg, scoring).first;
  case PruneStrategy::Kind::TopK:
    return prune_topk(std::move(state), fraction, cfg, scoring).first;
  case PruneStrategy::Kind::Random:
    return prune_random(std::move(state), fraction, cfg).first;
  case PruneStrategy::Kind::NoPrune:
    break;
  }
  return state;
}

} // namespace safesieve
