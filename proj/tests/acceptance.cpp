// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The SafeSieve Authors

// Acceptance suite: one PASS/FAIL line per criterion, exit code 1 if any fail.
// Pass --verbose for per-seed diagnostics.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "safesieve/commands.hpp"
#include "safesieve/oracle.hpp"
#include "safesieve/serialize.hpp"

using namespace safesieve;

namespace {

bool g_verbose = false;

struct Outcome {
  bool pass = true;
  std::string detail;
};

bool close_rel(double got, double want, double tol = 1e-12) {
  return std::abs(got - want) <= tol * std::max(1.0, std::abs(want));
}

// ---------------------------------------------------------------------------
// 1. closed forms

Outcome formulas() {
  Outcome out;
  std::size_t checks = 0;
  auto expect = [&](const std::string &what, double got, double want) {
    ++checks;
    if (!close_rel(got, want)) {
      out.pass = false;
      out.detail += fmt::format("{}: got {:.17g}, want {:.17g}; ", what, got, want);
    }
  };

  ScoringConfig sc;
  PruneConfig pc;
  for (std::uint64_t t : {0ULL, 1ULL, 150ULL, 300ULL}) {
    expect(fmt::format("theta({})", t), threshold_at(t, 300, pc), 0.0);
  }
  expect("theta(2T)", threshold_at(600, 300, pc), 0.5 * (1.0 - std::exp(-2.0)));
  expect("theta(2T) decimal", std::round(threshold_at(600, 300, pc) * 1e5) / 1e5, 0.43233);
  expect("theta(1000T)", threshold_at(300000, 300, pc), 0.5);

  expect("E(T/2)", integrated_edge_score(150, sc, 0.8, 0.4), 0.9);
  expect("E(0)", integrated_edge_score(0, sc, 0.8, 0.4), 1.0 * 0.8 + 0.5 * 0.4);
  expect("E(T)", integrated_edge_score(300, sc, 0.8, 0.4), 2.0 * 0.4);
  expect("E(2T) clamps", integrated_edge_score(600, sc, 0.8, 0.4), 2.0 * 0.4);

  HistoryLedger ledger(3);
  expect("C empty", historical_complementarity(ledger, Edge{AgentId{0}, AgentId{1}}, active_edges(new_complete_graph(3)), 3, 1e-6), 0.0);
  // Counts 3 on (0,1) and 2 on (1,2): total 5.
  for (int k = 0; k < 3; ++k) record_episode_outcome(ledger, std::vector<Edge>{{AgentId{0}, AgentId{1}}}, true);
  for (int k = 0; k < 2; ++k) record_episode_outcome(ledger, std::vector<Edge>{{AgentId{1}, AgentId{2}}}, true);
  const EdgeSet all = active_edges(new_complete_graph(3));
  expect("C 3/5", historical_complementarity(ledger, Edge{AgentId{0}, AgentId{1}}, all, 3, 1e-6),
         3.0 / (5.0 + 9e-6));
  expect("C 3/5 decimal",
         std::round(historical_complementarity(ledger, Edge{AgentId{0}, AgentId{1}}, all, 3, 1e-6) * 1e8) / 1e8,
         0.59999892);

  const std::vector<std::pair<double, double>> bins{
      {0.0, 0.1}, {0.19999, 0.1}, {0.2, 0.3}, {0.39, 0.3}, {0.4, 0.5}, {0.55, 0.5},
      {0.6, 0.7}, {0.79, 0.7},    {0.8, 0.9}, {0.95, 0.9}, {1.0, 0.9}};
  for (const auto &[x, q] : bins) expect(fmt::format("Q({})", x), quantize_expert_score(x), q);

  out.detail = fmt::format("{} checks{}{}", checks, out.detail.empty() ? "" : "; ", out.detail);
  return out;
}

// ---------------------------------------------------------------------------
// 2. oracle suite

Outcome oracle_suite() {
  Outcome out;
  constexpr double eps = 1e-6;
  std::size_t instances = 0;
  double worst = 1.0;
  for (std::size_t s = 0; s < 200; ++s) {
    const std::size_t n = 4 + s % 4;
    Rng rng = make_rng(derive_seed(stream_tag("acceptance-oracle"), s));
    const oracle::Instance inst = oracle::random_connected_instance(n, rng);
    const TerminalSet terms = select_terminals(inst.scores, inst.graph, eps);
    const oracle::SubsetOptimum best = oracle::best_terminal_subset(inst, terms.size(), eps);
    const double greedy = oracle::terminal_objective(inst, terms.terminals, eps);
    const DistanceMetric metric = build_distances(inst.scores, inst.graph, eps);
    const ClusterAssignment h = assign_clusters(inst.graph, terms, metric);
    const ClusterAssignment x = solve_zero_extension_exact(inst.graph, terms, metric);
    ++instances;

    if (!close_rel(greedy, best.objective, 1e-9) ||
        (best.maximizers == 1 && best.subset != terms.terminals)) {
      out.pass = false;
      out.detail += fmt::format("seed {}: greedy terminals not optimal; ", s);
    }
    if (x.cost > h.cost) {
      out.pass = false;
      out.detail += fmt::format("seed {}: exact {} > heuristic {}; ", s, x.cost, h.cost);
    }
    for (const AgentId t : terms.terminals) {
      if (h.f[t.value()] != t || x.f[t.value()] != t) {
        out.pass = false;
        out.detail += fmt::format("seed {}: terminal {} not self-assigned; ", s, t.value());
      }
    }
    if (x.cost > 0.0) worst = std::max(worst, h.cost / x.cost);
  }
  out.detail = fmt::format("{} instances, worst heuristic/exact {:.3f}{}{}", instances, worst,
                           out.detail.empty() ? "" : "; ", out.detail);
  return out;
}

// ---------------------------------------------------------------------------
// 3. prune budget exactness

EngineState random_engine_state(Rng &rng, const PruneConfig &pc, std::uint64_t seed) {
  std::uniform_int_distribution<std::size_t> size(5, 12);
  const std::size_t n = size(rng);
  std::uniform_real_distribution<double> score(0.0, 1.0);
  EdgeScoreMatrix scores{SquareMatrix<double>(n), SquareMatrix<double>(n), SquareMatrix<double>(n)};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      // Coarse grid so ties occur.
      scores.semantic(i, j) = std::round(score(rng) * 20.0) / 20.0;
      scores.integrated(i, j) = scores.semantic(i, j);
    }
  }
  EngineState state = make_engine_state(std::move(scores), seed);

  // Some history and some earlier pruning, keeping R below the cap.
  std::bernoulli_distribution coin(0.3);
  for (int k = 0; k < 20; ++k) {
    EdgeSet used;
    for (const Edge &e : state.graph.active_edges()) {
      if (coin(rng)) used.push_back(e);
    }
    record_episode_outcome(state.ledger, used, coin(rng));
  }
  EdgeSet removed;
  const std::size_t cap = static_cast<std::size_t>(0.2 * static_cast<double>(state.original_edge_count));
  for (const Edge &e : state.graph.active_edges()) {
    if (removed.size() < cap && coin(rng)) removed.push_back(e);
  }
  state.graph = apply_prune_mask(state.graph, removed);
  state.pruned_total = removed.size();
  std::uniform_int_distribution<std::uint64_t> step(0, 20);
  state.t = pc.b_start + pc.prune_interval * step(rng);
  return state;
}

Outcome prune_budget() {
  Outcome out;
  const ScoringConfig sc;
  const PruneConfig pc;
  Rng rng = make_rng(stream_tag("acceptance-budget"));
  std::size_t states = 0;
  std::size_t with_rule = 0;
  std::uint64_t s = 0;
  while (states < 100) {
    EngineState state = random_engine_state(rng, pc, s++);
    if (!should_prune(state, pc)) continue;
    ++states;
    const std::size_t active = state.graph.active_edge_count();
    const std::size_t target = static_cast<std::size_t>(std::floor(pc.r * static_cast<double>(active) + 0.5));
    const auto [next, event] = prune_step(state, pc, sc);
    with_rule += event.rule_set.empty() ? 0 : 1;

    if (event.pruned_count() != target) {
      out.pass = false;
      out.detail += fmt::format("state {}: pruned {} of target {}; ", states, event.pruned_count(), target);
    }
    for (const Edge &e : event.rule_set) {
      if (std::find(event.budget_set.begin(), event.budget_set.end(), e) != event.budget_set.end()) {
        out.pass = false;
        out.detail += fmt::format("state {}: rule and budget overlap; ", states);
      }
      if (std::binary_search(event.assignment->terminals.begin(), event.assignment->terminals.end(), e.from) ||
          std::binary_search(event.assignment->terminals.begin(), event.assignment->terminals.end(), e.to)) {
        out.pass = false;
        out.detail += fmt::format("state {}: rule edge touches a terminal; ", states);
      }
    }
  }
  out.detail = fmt::format("{} states ({} with a non-empty rule tier){}{}", states, with_rule,
                           out.detail.empty() ? "" : "; ", out.detail);
  return out;
}

// ---------------------------------------------------------------------------
// 4 and 9. structural safety and calibration over full trials

struct SafetyRun {
  Outcome structural;
  Outcome calibration;
};

SafetyRun structural_safety() {
  SafetyRun run;
  const RunConfig cfg;
  const PruneStrategy strategy{PruneStrategy::Kind::SafeSieve, std::nullopt};
  std::size_t events_checked = 0;
  double worst_mean = 0.0;
  double min_beta = std::numeric_limits<double>::infinity();
  double max_rate = 0.0;

  for (std::uint64_t r = 0; r < 50; ++r) {
    const std::uint64_t seed = replicate_seed(stream_tag("acceptance-safety"), r);
    RunConfig seeded = cfg;
    seeded.scenario.adversaries = r % 2; // half the trials carry an adversary
    const Scenario scenario = build_scenario(seeded, seed, true);
    TrialConfig tc = trial_config(seeded);
    tc.world.seed = episode_stream_seed(seed);

    std::vector<std::uint8_t> last;
    auto observer = [&](const EngineState &state) {
      std::vector<std::uint8_t> now;
      for (std::size_t i = 0; i < state.graph.size(); ++i) {
        for (std::size_t j = 0; j < state.graph.size(); ++j) now.push_back(state.graph.mask(i, j));
      }
      if (!last.empty()) {
        for (std::size_t k = 0; k < now.size(); ++k) {
          if (now[k] > last[k]) {
            run.structural.pass = false;
            run.structural.detail = fmt::format("seed {}: mask entry {} re-activated", r, k);
          }
        }
      }
      last = std::move(now);
      if (state.graph.active_node_count() <= 2) {
        run.structural.pass = false;
        run.structural.detail = fmt::format("seed {}: {} active nodes", r, state.graph.active_node_count());
      }
      max_rate = std::max(max_rate, state.pruned_rate());
      if (state.pruned_rate() > tc.prune.r_max + tc.prune.r) {
        run.structural.pass = false;
        run.structural.detail = fmt::format("seed {}: R = {}", r, state.pruned_rate());
      }
    };
    const TrialResult trial = run_trial(strategy, scenario, tc, observer);

    // Calibration is read back from the serialized event log.
    std::stringstream log;
    write_event_log(log, trial.final_state.events);
    for (const PruneEvent &e : read_event_log(log, scenario.agents.size())) {
      if (e.pruned_count() == 0) continue;
      ++events_checked;
      worst_mean = std::max(worst_mean, std::abs(e.normalized_mean));
      min_beta = std::min(min_beta, e.beta_hat);
      if (!(std::abs(e.normalized_mean) <= 1e-9) || !(e.beta_hat > 0.0)) {
        run.calibration.pass = false;
        run.calibration.detail = fmt::format("seed {} t={}: mean {}, beta_hat {}", r, e.t,
                                             e.normalized_mean, e.beta_hat);
      }
    }
  }
  if (run.structural.pass) {
    run.structural.detail = fmt::format("50 trials, max R = {:.4f}", max_rate);
  }
  if (events_checked == 0) {
    run.calibration.pass = false;
    run.calibration.detail = "no prune events to check";
  } else if (run.calibration.pass) {
    run.calibration.detail = fmt::format("{} events, max |mean| = {:.2e}, min beta_hat = {:.4f}",
                                         events_checked, worst_mean, min_beta);
  }
  return run;
}

// ---------------------------------------------------------------------------
// 5. token-reduction band

Outcome token_band() {
  Outcome out;
  RunConfig cfg;
  cfg.replicates = 20;
  const ComparisonReport report = compare_strategies(
      {PruneStrategy{PruneStrategy::Kind::SafeSieve, std::nullopt},
       PruneStrategy{PruneStrategy::Kind::NoPrune, std::nullopt}},
      [&](std::uint64_t seed) { return build_scenario(cfg, seed, false); }, {}, trial_config(cfg),
      stream_tag("acceptance-tokens"), cfg.replicates);
  const StrategyReport &ss = report.strategies.front();
  const double reduction = ss.token_reduction_pct;
  const double gap_pp = 100.0 * std::abs(ss.accuracy_delta);
  out.pass = reduction >= 10.0 && reduction <= 40.0 && gap_pp <= 2.0;
  out.detail = fmt::format("token reduction {:.2f}% (band 10-40), accuracy {:.4f} vs {:.4f} ({:.2f} pp)",
                           reduction, ss.mean_accuracy, report.reference.mean_accuracy, gap_pp);
  return out;
}

// ---------------------------------------------------------------------------
// 6. adversarial robustness

Outcome adversarial() {
  Outcome out;
  RunConfig cfg;
  cfg.scenario.adversaries = 1;
  cfg.scenario.adversary_quality = 0.0;
  const PruneStrategy safesieve{PruneStrategy::Kind::SafeSieve, std::nullopt};
  const PruneStrategy topk{PruneStrategy::Kind::TopK, std::nullopt};
  constexpr std::size_t kSeeds = 50;
  constexpr std::uint64_t kBatches = 50;

  double drop_ss = 0.0;
  double drop_tk = 0.0;
  std::size_t detected = 0;
  for (std::uint64_t r = 0; r < kSeeds; ++r) {
    const std::uint64_t seed = replicate_seed(stream_tag("acceptance-adversary"), r);
    const Scenario clean = build_scenario(cfg, seed, false);
    const Scenario attacked = build_scenario(cfg, seed, true);
    TrialConfig tc = trial_config(cfg);
    tc.world.seed = episode_stream_seed(seed);

    const double ss_clean = run_trial(safesieve, clean, tc).metrics.mean_accuracy();
    const double tk_clean = run_trial(topk, clean, tc).metrics.mean_accuracy();
    const TrialResult ss_hit = run_trial(safesieve, attacked, tc);
    const double tk_hit = run_trial(topk, attacked, tc).metrics.mean_accuracy();
    drop_ss += ss_clean - ss_hit.metrics.mean_accuracy();
    drop_tk += tk_clean - tk_hit;

    // Detection: the same attacked trial stretched to 50 batches.
    TrialConfig long_tc = tc;
    long_tc.episodes = kBatches * tc.batch_size;
    const TrialResult long_run = run_trial(safesieve, attacked, long_tc);
    const std::size_t n = attacked.agents.size();
    const AgentId adv{n - 1};
    std::size_t incident = 0;
    std::size_t pruned = 0;
    for (std::size_t u = 0; u < n; ++u) {
      if (u == adv.value()) continue;
      incident += 2;
      pruned += long_run.final_state.graph.mask(adv.value(), u) == 0 ? 1 : 0;
      pruned += long_run.final_state.graph.mask(u, adv.value()) == 0 ? 1 : 0;
    }
    const double frac = static_cast<double>(pruned) / static_cast<double>(incident);
    detected += frac >= 0.8 ? 1 : 0;
    if (g_verbose) {
      std::printf("    seed %2llu: drop safesieve %+.4f topk %+.4f  adversary edges pruned %.2f\n",
                  static_cast<unsigned long long>(r), ss_clean - ss_hit.metrics.mean_accuracy(),
                  tk_clean - tk_hit, frac);
    }
  }
  drop_ss /= kSeeds;
  drop_tk /= kSeeds;
  const double detect_rate = static_cast<double>(detected) / kSeeds;
  out.pass = drop_ss <= drop_tk && detect_rate >= 0.9;
  out.detail = fmt::format("mean drop safesieve {:+.4f} vs topk {:+.4f}; >=80% adversary edges pruned "
                           "within {} batches in {:.0f}% of seeds",
                           drop_ss, drop_tk, kBatches, 100.0 * detect_rate);
  return out;
}

// ---------------------------------------------------------------------------
// 7. cluster preservation

Outcome cluster_preservation() {
  Outcome out;
  RunConfig cfg;
  cfg.scenario.kind = ScenarioKind::Planted;
  const PruneStrategy safesieve{PruneStrategy::Kind::SafeSieve, std::nullopt};
  const PruneStrategy topk{PruneStrategy::Kind::TopK, std::nullopt};
  constexpr std::size_t kSeeds = 50;

  std::size_t wins = 0;
  std::size_t matched = 0;
  for (std::uint64_t r = 0; r < kSeeds; ++r) {
    const std::uint64_t seed = replicate_seed(stream_tag("acceptance-clusters"), r);
    const Scenario world = build_scenario(cfg, seed, false);
    TrialConfig tc = trial_config(cfg);
    tc.world.seed = episode_stream_seed(seed);
    const TrialResult ss = run_trial(safesieve, world, tc);
    const TrialResult tk = run_trial(topk, world, tc);

    auto intra = [&](const CommunicationGraph &g) {
      std::size_t count = 0;
      for (const Edge &e : g.active_edges()) {
        count += world.cluster_of[e.from.value()] == world.cluster_of[e.to.value()] ? 1 : 0;
      }
      return count;
    };
    const std::size_t a = intra(ss.final_state.graph);
    const std::size_t b = intra(tk.final_state.graph);
    const std::size_t ea = ss.final_state.graph.active_edge_count();
    const std::size_t eb = tk.final_state.graph.active_edge_count();
    matched += ea == eb ? 1 : 0;
    wins += a > b ? 1 : 0;
    if (g_verbose) {
      std::printf("    seed %2llu: intra kept safesieve %zu/%zu topk %zu/%zu\n",
                  static_cast<unsigned long long>(r), a, ea, b, eb);
    }
  }
  const double rate = static_cast<double>(wins) / kSeeds;
  out.pass = rate >= 0.9;
  out.detail = fmt::format("safesieve keeps strictly more intra-cluster edges in {:.0f}% of seeds "
                           "(same retained edge count in {}/{})",
                           100.0 * rate, matched, kSeeds);
  return out;
}

// ---------------------------------------------------------------------------
// 8. determinism

std::string slurp(const std::filesystem::path &p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome determinism() {
  Outcome out;
  const auto base = std::filesystem::temp_directory_path() / fmt::format("safesieve-accept-{}", ::getpid());
  RunConfig cfg;
  cfg.scenario.adversaries = 1;
  cfg.seed = 7;
  std::ostringstream sink;
  cfg.output_dir = base / "a";
  const int rc_a = cmd_simulate(cfg, sink);
  cfg.output_dir = base / "b";
  const int rc_b = cmd_simulate(cfg, sink);
  if (rc_a != kExitOk || rc_b != kExitOk) {
    out.pass = false;
    out.detail = "simulate failed: " + sink.str();
  } else {
    std::size_t bytes = 0;
    for (const char *name : {"metrics.csv", "events.jsonl", "summary.json"}) {
      const std::string a = slurp(base / "a" / name);
      const std::string b = slurp(base / "b" / name);
      bytes += a.size();
      if (a.empty() || a != b) {
        out.pass = false;
        out.detail += fmt::format("{} differs; ", name);
      }
    }
    if (out.pass) out.detail = fmt::format("3 files, {} bytes, identical", bytes);
  }
  std::filesystem::remove_all(base);
  return out;
}

// ---------------------------------------------------------------------------

struct Criterion {
  int id;
  std::string name;
  double limit_seconds;
};

int report(const Criterion &c, const Outcome &o, double seconds) {
  const bool in_time = seconds < c.limit_seconds;
  const bool pass = o.pass && in_time;
  std::printf("criterion %d %-28s %s  %.2fs (limit %.0fs)  %s%s\n", c.id, c.name.c_str(),
              pass ? "PASS" : "FAIL", seconds, c.limit_seconds, o.detail.c_str(),
              in_time ? "" : " [over time limit]");
  std::fflush(stdout);
  return pass ? 0 : 1;
}

template <class F>
std::pair<Outcome, double> timed(F &&f) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o = f();
  const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - start;
  return {std::move(o), dt.count()};
}

} // namespace

int main(int argc, char **argv) {
  spdlog::set_level(spdlog::level::err);
  std::vector<int> only;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--verbose") g_verbose = true;
    else only.push_back(std::stoi(arg));
  }
  auto wanted = [&](int id) { return only.empty() || std::find(only.begin(), only.end(), id) != only.end(); };

  int failures = 0;
  auto run = [&](const Criterion &c, const std::function<Outcome()> &f) {
    if (!wanted(c.id)) return;
    auto [o, s] = timed(f);
    failures += report(c, o, s);
  };

  run({1, "formula closed forms", 1}, formulas);
  run({2, "0-extension oracle suite", 30}, oracle_suite);
  run({3, "prune-budget exactness", 10}, prune_budget);

  if (wanted(4) || wanted(9)) {
    const auto start = std::chrono::steady_clock::now();
    const SafetyRun safety = structural_safety();
    const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - start;
    if (wanted(4)) failures += report({4, "structural safety", 60}, safety.structural, dt.count());
    if (wanted(9)) failures += report({9, "normalization calibration", 60}, safety.calibration, 0.0);
  }

  run({5, "token-reduction band", 120}, token_band);
  run({6, "adversarial robustness", 180}, adversarial);
  run({7, "cluster preservation", 120}, cluster_preservation);
  run({8, "determinism", 30}, determinism);

  std::printf("%s: %d criterion failure(s)\n", failures == 0 ? "ALL PASS" : "FAILURES", failures);
  return failures == 0 ? 0 : 1;
}
