// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The SafeSieve Authors

#include "safesieve/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <map>
#include <set>
#include <stdexcept>

#include <fmt/format.h>

namespace safesieve {

void WorldConfig::validate() const {
  if (!(clamp_low > 0.0 && clamp_low < clamp_high && clamp_high < 1.0)) {
    throw std::invalid_argument("world.clamp_low/clamp_high must satisfy 0 < low < high < 1");
  }
  if (rounds_per_episode == 0) {
    throw std::invalid_argument("world.rounds_per_episode must satisfy rounds_per_episode > 0");
  }
  if (!(gain >= 0.0) || !(malice_penalty >= 0.0)) {
    throw std::invalid_argument("world.gain and world.malice_penalty must be non-negative");
  }
}

const std::vector<CostTier> &default_cost_tiers() {
  static const std::vector<CostTier> tiers{
      {"commander", 1.00, 300, 500},
      {"large", 0.50, 200, 400},
      {"medium", 0.25, 200, 400},
      {"small", 0.10, 150, 350},
      {"tiny", 0.05, 150, 350},
  };
  return tiers;
}

double success_probability(const CommunicationGraph &g, std::span<const SyntheticAgent> agents,
                           const WorldConfig &world) {
  const std::size_t n = g.size();
  if (agents.size() != n) {
    throw std::invalid_argument(
        fmt::format("episode: {} agents for a graph of {} nodes", agents.size(), n));
  }
  const EdgeSet active = g.active_edges();
  if (active.empty()) {
    throw std::invalid_argument("episode: graph has no active edges");
  }
  double harmony = 0.0;
  std::size_t malicious = 0;
  for (const Edge &e : active) {
    harmony += agents[e.from.value()].quality * agents[e.to.value()].quality;
    malicious += agents[e.from.value()].malicious ? 1 : 0;
  }
  harmony /= static_cast<double>(n * (n - 1));
  const double malicious_share = static_cast<double>(malicious) / static_cast<double>(active.size());
  const double p = world.base_acc + world.gain * harmony - world.malice_penalty * malicious_share;
  return std::clamp(p, world.clamp_low, world.clamp_high);
}

EpisodeResult run_episode(const CommunicationGraph &g, std::span<const SyntheticAgent> agents,
                          const WorldConfig &world, Rng &rng) {
  const double p = success_probability(g, agents, world);
  const std::size_t n = g.size();
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  EpisodeResult out;
  out.correct = unit(rng) < p;

  std::vector<bool> engaged(n);
  for (std::size_t v = 0; v < n; ++v) {
    engaged[v] = unit(rng) < agents[v].quality;
  }

  const EdgeSet active = g.active_edges();
  for (const Edge &e : active) {
    if (engaged[e.from.value()] && engaged[e.to.value()]) {
      out.active_edges_used.push_back(e);
    }
  }

  out.rounds = world.rounds_per_episode;
  out.tokens_by_agent.assign(n, 0);
  for (std::uint32_t round = 0; round < world.rounds_per_episode; ++round) {
    for (const Edge &e : active) {
      const SyntheticAgent &src = agents[e.from.value()];
      std::uniform_int_distribution<std::uint32_t> size(src.tokens_lo, src.tokens_hi);
      out.tokens_by_agent[e.from.value()] += size(rng);
    }
  }

  // The answer comes from the strongest active agent.
  for (const AgentId v : g.active_nodes()) {
    if (!out.answerer || agents[v.value()].quality > agents[out.answerer->value()].quality) {
      out.answerer = v;
    }
  }
  return out;
}

std::vector<SyntheticAgent> inject_adversary(std::vector<SyntheticAgent> agents,
                                             std::size_t count, double quality_override) {
  if (count + 2 >= agents.size()) {
    throw std::invalid_argument(fmt::format(
        "inject adversary: {} adversaries among {} agents leaves fewer than 3 benign", count,
        agents.size()));
  }
  if (!(quality_override >= 0.0 && quality_override <= 1.0)) {
    throw std::invalid_argument("inject adversary: quality must lie in [0,1]");
  }
  for (std::size_t k = 0; k < count; ++k) {
    SyntheticAgent &a = agents[agents.size() - 1 - k];
    a.malicious = true;
    a.quality = quality_override;
  }
  return agents;
}

namespace {

std::vector<double> random_unit(std::size_t dim, Rng &rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> v(dim);
  double norm = 0.0;
  do {
    norm = 0.0;
    for (double &x : v) {
      x = normal(rng);
      norm += x * x;
    }
  } while (norm == 0.0);
  norm = std::sqrt(norm);
  for (double &x : v) x /= norm;
  return v;
}

std::shared_ptr<const CompatibilityScorer> scorer_for(const std::vector<SyntheticAgent> &agents,
                                                      const BenignWorldOptions &opts,
                                                      std::uint64_t seed) {
  std::set<AgentId> flagged;
  for (const SyntheticAgent &a : agents) {
    if (a.malicious) flagged.insert(a.id);
  }
  return std::make_shared<SyntheticScorer>(derive_seed(seed, stream_tag("expert")),
                                           opts.benign_band, std::move(flagged),
                                           opts.suspicious_band);
}

} // namespace

Scenario make_benign_world(const BenignWorldOptions &opts, std::uint64_t seed) {
  if (opts.agents < 3) {
    throw std::invalid_argument("benign world: need at least 3 agents");
  }
  if (!(opts.quality_lo >= 0.0 && opts.quality_lo <= opts.quality_hi && opts.quality_hi <= 1.0)) {
    throw std::invalid_argument("benign world: quality range must lie in [0,1]");
  }
  Rng rng = make_rng(derive_seed(seed, stream_tag("world")));
  std::uniform_real_distribution<double> quality(opts.quality_lo, opts.quality_hi);
  const std::vector<double> shared = random_unit(opts.embedding_dim, rng);
  const auto &tiers = default_cost_tiers();

  Scenario out;
  for (std::size_t i = 0; i < opts.agents; ++i) {
    const CostTier &tier = tiers[std::min(i, tiers.size() - 1)];
    SyntheticAgent a;
    a.id = AgentId{i};
    a.quality = quality(rng);
    a.tokens_lo = tier.tokens_lo;
    a.tokens_hi = tier.tokens_hi;
    a.cost_per_kilotoken = tier.cost_per_kilotoken;
    a.tier = tier.name;
    out.agents.push_back(a);

    const std::vector<double> own = random_unit(opts.embedding_dim, rng);
    AgentProfile p{AgentId{i}, fmt::format("role-{}", i), std::vector<double>(opts.embedding_dim)};
    const double ws = std::sqrt(opts.shared_weight);
    const double wo = std::sqrt(1.0 - opts.shared_weight);
    for (std::size_t k = 0; k < opts.embedding_dim; ++k) {
      p.embedding[k] = ws * shared[k] + wo * own[k];
    }
    out.profiles.push_back(std::move(p));
  }
  out.scorer = scorer_for(out.agents, opts, seed);
  return out;
}

Scenario with_adversaries(const Scenario &clean, const BenignWorldOptions &opts,
                          std::size_t count, double quality, std::uint64_t seed) {
  Scenario out = clean;
  out.agents = inject_adversary(clean.agents, count, quality);
  out.scorer = scorer_for(out.agents, opts, seed);
  return out;
}

Scenario make_planted_cluster_world(std::size_t n, std::size_t clusters, double intra_quality,
                                    double inter_noise, std::uint64_t seed) {
  if (clusters < 2 || n < 3 * clusters) {
    throw std::invalid_argument(
        fmt::format("planted world: need clusters ≥ 2 and n ≥ 3·clusters (n={}, clusters={})", n,
                    clusters));
  }
  if (!(inter_noise >= 0.0 && inter_noise <= 0.5)) {
    throw std::invalid_argument("planted world: inter_noise must lie in [0, 0.5]");
  }
  if (!(intra_quality >= 0.0 && intra_quality <= 1.0)) {
    throw std::invalid_argument("planted world: intra_quality must lie in [0,1]");
  }
  Rng rng = make_rng(derive_seed(seed, stream_tag("planted-world")));
  std::normal_distribution<double> jitter(0.0, 0.01);

  // Axes: one per cluster, one shared, one private per agent. With weights
  // a = 1 - 2v, v, v the intra cosine is 1 - v and the cross cosine is v.
  // The first agent of each cluster leads it and has no private component.
  const std::size_t dim = clusters + 1 + n;
  const double wc = std::sqrt(1.0 - 2.0 * inter_noise);
  const double ws = std::sqrt(inter_noise);
  const double wp = std::sqrt(inter_noise);
  const auto &tiers = default_cost_tiers();

  Scenario out;
  std::vector<bool> lead(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t c = i * clusters / n;
    lead[i] = i == 0 || out.cluster_of.back() != c;
    out.cluster_of.push_back(c);

    std::vector<double> e(dim, 0.0);
    e[c] = wc;
    e[clusters] = ws;
    if (!lead[i]) e[clusters + 1 + i] = wp;
    for (double &x : e) x += jitter(rng);
    out.profiles.push_back({AgentId{i}, fmt::format("{}-{}", lead[i] ? "lead" : "role", i), std::move(e)});

    const CostTier &tier = tiers[std::min(i, tiers.size() - 1)];
    SyntheticAgent a;
    a.id = AgentId{i};
    a.quality = intra_quality;
    a.tokens_lo = tier.tokens_lo;
    a.tokens_hi = tier.tokens_hi;
    a.cost_per_kilotoken = tier.cost_per_kilotoken;
    a.tier = tier.name;
    out.agents.push_back(a);
  }

  // Expert view: a lead is rated highly by and toward its own team; every
  // other pair gets an uninformative draw.
  std::uniform_real_distribution<double> noise(0.2, 0.8);
  std::map<std::pair<std::uint32_t, std::uint32_t>, double> expert;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const bool team_lead = (lead[i] || lead[j]) && out.cluster_of[i] == out.cluster_of[j];
      expert[{static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j)}] =
          team_lead ? 0.9 : noise(rng);
    }
  }
  out.scorer = std::make_shared<TableScorer>(std::move(expert));
  return out;
}

std::uint64_t replicate_seed(std::uint64_t root, std::uint64_t r) { return derive_seed(root, r); }

std::uint64_t episode_stream_seed(std::uint64_t replicate) {
  return derive_seed(replicate, stream_tag("episodes"));
}

double TrialMetrics::mean_accuracy() const {
  return episodes == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(episodes);
}

std::vector<double> TrialMetrics::accuracy_series() const {
  std::vector<double> out;
  for (const BatchMetrics &b : batches) out.push_back(b.accuracy);
  return out;
}

TrialResult run_trial(const PruneStrategy &strategy, const Scenario &scenario,
                      const TrialConfig &cfg, const StepObserver &observer) {
  cfg.scoring.validate();
  cfg.prune.validate(cfg.scoring.horizon);
  cfg.world.validate();
  if (cfg.episodes == 0 || cfg.batch_size == 0) {
    throw std::invalid_argument("trial: episodes and batch_size must be positive");
  }
  const std::size_t n = scenario.agents.size();
  if (scenario.profiles.size() != n || !scenario.scorer) {
    throw std::invalid_argument("trial: scenario needs one profile per agent and a scorer");
  }

  EdgeScoreMatrix scores = init_compatibility_matrix(scenario.profiles, *scenario.scorer, cfg.scoring);
  EngineState state = make_engine_state(std::move(scores), derive_seed(cfg.world.seed, stream_tag("engine")));

  TrialResult out;
  out.strategy = strategy;
  TrialMetrics &m = out.metrics;
  m.per_agent_tokens.assign(n, 0);
  m.per_agent_cost.assign(n, 0.0);

  BatchMetrics batch;
  std::uint64_t batch_correct = 0;
  std::uint64_t batch_len = 0;
  for (std::uint64_t k = 0; k < cfg.episodes; ++k) {
    Rng rng = make_rng(derive_seed(cfg.world.seed, k));
    const EpisodeResult ep = run_episode(state.graph, scenario.agents, cfg.world, rng);

    for (std::size_t v = 0; v < n; ++v) {
      const std::uint64_t tokens = ep.tokens_by_agent[v];
      const double cost = static_cast<double>(tokens) * scenario.agents[v].cost_per_kilotoken / 1000.0;
      m.per_agent_tokens[v] += tokens;
      m.per_agent_cost[v] += cost;
      batch.tokens += tokens;
      batch.cost_cents += cost;
    }
    m.correct += ep.correct ? 1 : 0;
    m.episodes += 1;
    batch_correct += ep.correct ? 1 : 0;
    batch_len += 1;

    state = observe_and_step(std::move(state), ep, strategy, cfg.prune, cfg.scoring);
    if (observer) observer(state);

    if (batch_len == cfg.batch_size || k + 1 == cfg.episodes) {
      batch.accuracy = static_cast<double>(batch_correct) / static_cast<double>(batch_len);
      batch.active_edges = state.graph.active_edge_count();
      m.batches.push_back(batch);
      batch = BatchMetrics{};
      batch.batch = m.batches.size();
      batch_correct = 0;
      batch_len = 0;
    }
  }
  m.token_total = std::accumulate(m.per_agent_tokens.begin(), m.per_agent_tokens.end(), std::uint64_t{0});
  m.cost_total_cents = std::accumulate(m.per_agent_cost.begin(), m.per_agent_cost.end(), 0.0);
  out.final_state = std::move(state);
  return out;
}

namespace {

struct Aggregate {
  double accuracy = 0.0;
  double tokens = 0.0;
  double cost = 0.0;
  std::vector<double> cost_per_agent;
  std::vector<TrialResult> trials;
};

Aggregate run_replicates(const PruneStrategy &strategy,
                         const std::function<Scenario(std::uint64_t)> &make_scenario,
                         const TrialConfig &cfg, std::uint64_t root_seed, std::size_t replicates,
                         bool keep_trials) {
  Aggregate agg;
  for (std::size_t r = 0; r < replicates; ++r) {
    const std::uint64_t seed = replicate_seed(root_seed, r);
    TrialConfig trial_cfg = cfg;
    trial_cfg.world.seed = episode_stream_seed(seed);
    TrialResult trial = run_trial(strategy, make_scenario(seed), trial_cfg);
    agg.accuracy += trial.metrics.mean_accuracy();
    agg.tokens += static_cast<double>(trial.metrics.token_total);
    agg.cost += trial.metrics.cost_total_cents;
    if (agg.cost_per_agent.empty()) agg.cost_per_agent.assign(trial.metrics.per_agent_cost.size(), 0.0);
    for (std::size_t v = 0; v < agg.cost_per_agent.size(); ++v) {
      agg.cost_per_agent[v] += trial.metrics.per_agent_cost[v];
    }
    if (keep_trials) agg.trials.push_back(std::move(trial));
  }
  const double count = static_cast<double>(replicates);
  agg.accuracy /= count;
  agg.tokens /= count;
  agg.cost /= count;
  for (double &c : agg.cost_per_agent) c /= count;
  return agg;
}

StrategyReport to_report(const PruneStrategy &s, Aggregate agg) {
  StrategyReport rep;
  rep.strategy = s;
  rep.mean_accuracy = agg.accuracy;
  rep.token_total = agg.tokens;
  rep.cost_total_cents = agg.cost;
  rep.cost_per_agent = std::move(agg.cost_per_agent);
  rep.trials = std::move(agg.trials);
  return rep;
}

} // namespace

ComparisonReport compare_strategies(const std::vector<PruneStrategy> &strategies,
                                    const std::function<Scenario(std::uint64_t)> &clean,
                                    const std::function<Scenario(std::uint64_t)> &attacked,
                                    const TrialConfig &cfg, std::uint64_t root_seed,
                                    std::size_t replicates) {
  if (strategies.size() < 2) {
    throw std::invalid_argument("compare: need at least two strategies");
  }
  if (replicates == 0) {
    throw std::invalid_argument("compare: need at least one replicate");
  }
  const PruneStrategy noprune{PruneStrategy::Kind::NoPrune, std::nullopt};

  ComparisonReport report;
  report.replicates = replicates;
  report.reference = to_report(noprune, run_replicates(noprune, clean, cfg, root_seed, replicates, false));

  for (const PruneStrategy &s : strategies) {
    StrategyReport rep = to_report(s, run_replicates(s, clean, cfg, root_seed, replicates, true));
    if (attacked) {
      const Aggregate hit = run_replicates(s, attacked, cfg, root_seed, replicates, false);
      rep.attacked_accuracy = hit.accuracy;
      rep.accuracy_drop = rep.mean_accuracy - hit.accuracy;
    }
    report.strategies.push_back(std::move(rep));
  }

  const StrategyReport &ref = report.reference;
  const double first_acc = report.strategies.front().mean_accuracy;
  for (StrategyReport &rep : report.strategies) {
    rep.accuracy_delta = rep.mean_accuracy - ref.mean_accuracy;
    rep.accuracy_delta_vs_first = rep.mean_accuracy - first_acc;
    rep.token_reduction_pct =
        ref.token_total > 0.0 ? 100.0 * (ref.token_total - rep.token_total) / ref.token_total : 0.0;
  }
  return report;
}

} // namespace safesieve
