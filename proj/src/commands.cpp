// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The SafeSieve Authors

#include "safesieve/commands.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "safesieve/oracle.hpp"
#include "safesieve/serialize.hpp"

namespace safesieve {

namespace {

namespace fs = std::filesystem;

BenignWorldOptions world_options(const RunConfig &cfg, std::size_t agents) {
  BenignWorldOptions opts;
  opts.agents = agents;
  opts.quality_lo = cfg.scenario.quality_lo;
  opts.quality_hi = cfg.scenario.quality_hi;
  return opts;
}

void write_file(const fs::path &path, const std::string &text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(fmt::format("cannot write {}", path.string()));
  out << text;
}

std::string metrics_text(const TrialMetrics &m) {
  std::ostringstream out;
  write_metrics_csv(out, m);
  return out.str();
}

std::string events_text(const std::vector<PruneEvent> &events) {
  std::ostringstream out;
  write_event_log(out, events);
  return out.str();
}

} // namespace

Scenario build_scenario(const RunConfig &cfg, std::uint64_t seed, bool adversarial) {
  std::optional<std::vector<AgentProfile>> loaded;
  std::size_t agents = cfg.scenario.agents;
  if (cfg.agents_file) {
    loaded = load_embeddings(*cfg.agents_file);
    agents = loaded->size();
  }

  Scenario scenario;
  const BenignWorldOptions opts = world_options(cfg, agents);
  if (cfg.scenario.kind == ScenarioKind::Planted) {
    scenario = make_planted_cluster_world(agents, cfg.scenario.clusters, cfg.scenario.quality_hi,
                                          cfg.scenario.inter_noise, seed);
  } else {
    scenario = make_benign_world(opts, seed);
  }
  if (loaded) scenario.profiles = std::move(*loaded);

  const bool inject = adversarial && cfg.scenario.adversaries > 0;
  if (inject) {
    if (cfg.scenario.kind == ScenarioKind::Benign) {
      scenario = with_adversaries(scenario, opts, cfg.scenario.adversaries,
                                  cfg.scenario.adversary_quality, seed);
    } else {
      scenario.agents = inject_adversary(std::move(scenario.agents), cfg.scenario.adversaries,
                                         cfg.scenario.adversary_quality);
    }
  }
  if (cfg.expert_scores_file) {
    scenario.scorer = std::make_shared<TableScorer>(load_expert_scores(*cfg.expert_scores_file));
  }
  return scenario;
}

TrialConfig trial_config(const RunConfig &cfg) {
  TrialConfig t;
  t.scoring = cfg.scoring;
  t.prune = cfg.prune;
  t.world = cfg.world;
  t.episodes = cfg.episodes;
  t.batch_size = cfg.batch_size;
  return t;
}

int cmd_simulate(const RunConfig &cfg, std::ostream &log) {
  try {
    cfg.validate();
    const std::uint64_t seed = replicate_seed(cfg.seed, 0);
    const Scenario scenario = build_scenario(cfg, seed, true);
    TrialConfig tc = trial_config(cfg);
    tc.world.seed = episode_stream_seed(seed);
    const TrialResult trial = run_trial(cfg.strategy, scenario, tc);

    fs::create_directories(cfg.output_dir);
    write_file(cfg.output_dir / "metrics.csv", metrics_text(trial.metrics));
    write_file(cfg.output_dir / "events.jsonl", events_text(trial.final_state.events));
    Json summary = trial_summary_to_json(trial);
    summary["seed"] = cfg.seed;
    write_file(cfg.output_dir / "summary.json", summary.dump(2) + "\n");

    fmt::print(log, "{}: accuracy {:.4f}, tokens {}, cost {:.2f} cents, {} prune events -> {}\n",
               cfg.strategy.name(), trial.metrics.mean_accuracy(), trial.metrics.token_total,
               trial.metrics.cost_total_cents, trial.final_state.events.size(),
               cfg.output_dir.string());
    return kExitOk;
  } catch (const ConfigError &e) {
    fmt::print(log, "error: {}\n", e.what());
    return kExitViolation;
  } catch (const std::exception &e) {
    fmt::print(log, "error: {}\n", e.what());
    return kExitError;
  }
}

int cmd_compare(const RunConfig &cfg, const std::vector<PruneStrategy> &strategies,
                std::ostream &log) {
  if (strategies.size() < 2) {
    fmt::print(log, "error: compare needs at least two strategies\n");
    return kExitViolation;
  }
  try {
    cfg.validate();
    auto clean = [&cfg](std::uint64_t seed) { return build_scenario(cfg, seed, false); };
    std::function<Scenario(std::uint64_t)> attacked;
    if (cfg.scenario.adversaries > 0) {
      attacked = [&cfg](std::uint64_t seed) { return build_scenario(cfg, seed, true); };
    }
    const ComparisonReport report =
        compare_strategies(strategies, clean, attacked, trial_config(cfg), cfg.seed, cfg.replicates);

    fs::create_directories(cfg.output_dir);
    Json doc = comparison_to_json(report);
    doc["seed"] = cfg.seed;
    write_file(cfg.output_dir / "report.json", doc.dump(2) + "\n");
    for (std::size_t k = 0; k < report.strategies.size(); ++k) {
      const StrategyReport &s = report.strategies[k];
      const fs::path dir = cfg.output_dir / fmt::format("{}_{}", k, s.strategy.name());
      fs::create_directories(dir);
      write_file(dir / "metrics.csv", metrics_text(s.trials.front().metrics));
      write_file(dir / "events.jsonl", events_text(s.trials.front().final_state.events));
    }

    for (const StrategyReport &s : report.strategies) {
      fmt::print(log, "{:<10} accuracy {:.4f} (Δ {:+.4f})  tokens −{:.1f}%", s.strategy.name(),
                 s.mean_accuracy, s.accuracy_delta, s.token_reduction_pct);
      if (s.accuracy_drop) fmt::print(log, "  drop under attack {:+.4f}", *s.accuracy_drop);
      fmt::print(log, "\n");
    }
    return kExitOk;
  } catch (const ConfigError &e) {
    fmt::print(log, "error: {}\n", e.what());
    return kExitViolation;
  } catch (const std::exception &e) {
    fmt::print(log, "error: {}\n", e.what());
    return kExitError;
  }
}

int cmd_oracle_check(const OracleCheckOptions &opts, std::ostream &log) {
  if (opts.n_max < 4 || opts.n_max > 10) {
    fmt::print(log, "error: --n-max must lie in [4, 10], got {}\n", opts.n_max);
    return kExitViolation;
  }
  if (opts.seeds == 0) {
    fmt::print(log, "error: --seeds must be positive\n");
    return kExitViolation;
  }
  constexpr double kEps = 1e-6;
  static constexpr std::array<double, 6> kEdges{1.0, 1.1, 1.25, 1.5, 2.0, 2.5};

  struct Sweep {
    std::string name;
    std::array<std::size_t, kEdges.size() + 1> bins{};
    std::size_t instances = 0;
    double worst = 1.0;
  };
  Sweep general{"connected"};
  Sweep trees{"tree-2-terminals"};

  auto record = [](Sweep &s, double ratio) {
    std::size_t b = 0;
    while (b < kEdges.size() && ratio > kEdges[b]) ++b;
    s.bins[b] += 1;
    s.instances += 1;
    s.worst = std::max(s.worst, ratio);
  };

  auto fail = [&](const std::string &why, const oracle::Instance &inst, const TerminalSet &terms) {
    Json j;
    j["reason"] = why;
    j["graph"] = graph_to_json(inst.graph);
    j["scores"] = matrix_to_json(inst.scores.integrated);
    Json t = Json::array();
    for (const AgentId v : terms.terminals) t.push_back(v.index);
    j["terminals"] = std::move(t);
    fmt::print(log, "invariant violated: {}\n{}\n", why, j.dump());
    if (opts.output_dir) {
      fs::create_directories(*opts.output_dir);
      write_file(*opts.output_dir / "oracle_failure.json", j.dump(2) + "\n");
    }
    return kExitViolation;
  };

  auto check = [&](Sweep &sweep, const oracle::Instance &inst, const TerminalSet &terms) -> std::optional<int> {
    const DistanceMetric metric = build_distances(inst.scores, inst.graph, kEps);
    const ClusterAssignment heuristic = assign_clusters(inst.graph, terms, metric);
    const ClusterAssignment exact = solve_zero_extension_exact(inst.graph, terms, metric);
    for (const AgentId t : terms.terminals) {
      if (heuristic.f[t.value()] != t || exact.f[t.value()] != t) {
        return fail("terminal self-assignment", inst, terms);
      }
    }
    if (exact.cost > heuristic.cost) {
      return fail(fmt::format("oracle dominance (exact {} > heuristic {})", exact.cost, heuristic.cost),
                  inst, terms);
    }
    double ratio = 1.0;
    if (exact.cost > 0.0) ratio = heuristic.cost / exact.cost;
    else if (heuristic.cost > 0.0) ratio = kUnreachable;
    record(sweep, ratio);
    return std::nullopt;
  };

  for (std::size_t n = 4; n <= opts.n_max; ++n) {
    for (std::size_t s = 0; s < opts.seeds; ++s) {
      Rng rng = make_rng(derive_seed(derive_seed(opts.root_seed, n), s));
      const oracle::Instance inst = oracle::random_connected_instance(n, rng);
      const TerminalSet terms = select_terminals(inst.scores, inst.graph, kEps);
      const oracle::SubsetOptimum best = oracle::best_terminal_subset(inst, terms.size(), kEps);
      const double greedy = oracle::terminal_objective(inst, terms.terminals, kEps);
      if (std::abs(greedy - best.objective) > 1e-9 * std::abs(best.objective) ||
          (best.maximizers == 1 && best.subset != terms.terminals)) {
        return fail("greedy terminals differ from exhaustive subset optimum", inst, terms);
      }
      if (auto code = check(general, inst, terms)) return *code;

      Rng tree_rng = make_rng(derive_seed(derive_seed(opts.root_seed, 1000 + n), s));
      const oracle::Instance tree = oracle::random_tree_instance(n, tree_rng);
      std::uniform_int_distribution<std::size_t> pick(0, n - 1);
      std::size_t a = pick(tree_rng);
      std::size_t b = pick(tree_rng);
      while (b == a) b = pick(tree_rng);
      const TerminalSet pair{{AgentId{std::min(a, b)}, AgentId{std::max(a, b)}}};
      if (auto code = check(trees, tree, pair)) return *code;
    }
  }

  Json report = Json::object();
  for (const Sweep *sweep : {&general, &trees}) {
    fmt::print(log, "{}: {} instances, worst heuristic/exact ratio {:.4f}\n", sweep->name,
               sweep->instances, sweep->worst);
    Json bins = Json::array();
    double lo = 0.0;
    for (std::size_t b = 0; b < sweep->bins.size(); ++b) {
      const std::string label = b < kEdges.size()
                                    ? (b == 0 ? "=1" : fmt::format("({},{}]", lo, kEdges[b]))
                                    : fmt::format(">{}", kEdges.back());
      if (b < kEdges.size()) lo = kEdges[b];
      fmt::print(log, "  {:<12} {}\n", label, sweep->bins[b]);
      bins.push_back({{"bin", label}, {"count", sweep->bins[b]}});
    }
    report[sweep->name] = {{"instances", sweep->instances}, {"worst_ratio", sweep->worst},
                           {"histogram", std::move(bins)}};
  }
  if (opts.output_dir) {
    fs::create_directories(*opts.output_dir);
    write_file(*opts.output_dir / "oracle_report.json", report.dump(2) + "\n");
  }
  fmt::print(log, "all invariants hold\n");
  return kExitOk;
}

int cmd_prune_demo(const RunConfig &cfg, std::ostream &log) {
  try {
    cfg.validate();
    const std::uint64_t seed = replicate_seed(cfg.seed, 0);
    const Scenario scenario = build_scenario(cfg, seed, true);
    TrialConfig tc = trial_config(cfg);
    tc.world.seed = episode_stream_seed(seed);

    Json trace = Json::array();
    std::size_t seen = 0;
    auto observer = [&](const EngineState &state) {
      if (state.events.size() == seen) return;
      seen = state.events.size();
      Json step;
      step["event"] = event_to_json(state.events.back());
      step["semantic"] = matrix_to_json(state.scores.semantic);
      step["integrated"] = matrix_to_json(state.scores.integrated);
      step["normalized"] = matrix_to_json(state.scores.normalized);
      step["graph"] = graph_to_json(state.graph);
      trace.push_back(std::move(step));
    };
    PruneStrategy strategy = cfg.strategy;
    strategy.kind = PruneStrategy::Kind::SafeSieve;
    const TrialResult trial = run_trial(strategy, scenario, tc, observer);

    fs::create_directories(cfg.output_dir);
    Json doc;
    doc["seed"] = cfg.seed;
    doc["profiles"] = embeddings_to_json(scenario.profiles);
    doc["steps"] = std::move(trace);
    doc["summary"] = trial_summary_to_json(trial);
    write_file(cfg.output_dir / "prune_demo.json", doc.dump(2) + "\n");
    fmt::print(log, "{} prune events traced -> {}\n", seen,
               (cfg.output_dir / "prune_demo.json").string());
    return kExitOk;
  } catch (const ConfigError &e) {
    fmt::print(log, "error: {}\n", e.what());
    return kExitViolation;
  } catch (const std::exception &e) {
    fmt::print(log, "error: {}\n", e.what());
    return kExitError;
  }
}

} // namespace safesieve
