// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The SafeSieve Authors

#include <gtest/gtest.h>

#include <cmath>

#include "safesieve/clustering.hpp"
#include "safesieve/oracle.hpp"

namespace safesieve {
namespace {

constexpr double kEps = 1e-6;

EdgeScoreMatrix uniform_scores(std::size_t n, double value) {
  EdgeScoreMatrix s{SquareMatrix<double>(n), SquareMatrix<double>(n), SquareMatrix<double>(n)};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j) s.integrated(i, j) = value;
    }
  }
  return s;
}

CommunicationGraph graph_from_edges(std::size_t n, std::initializer_list<std::pair<int, int>> edges) {
  std::vector<std::uint8_t> mask(n * n, 0);
  for (auto [i, j] : edges) mask[static_cast<std::size_t>(i) * n + static_cast<std::size_t>(j)] = 1;
  return CommunicationGraph(n, std::move(mask), std::vector<bool>(n, true));
}

std::vector<AgentId> ids(std::initializer_list<std::size_t> v) {
  std::vector<AgentId> out;
  for (std::size_t x : v) out.push_back(AgentId{x});
  return out;
}

TEST(TerminalCount, Formula) {
  EXPECT_EQ(terminal_count(4), 2u);
  EXPECT_EQ(terminal_count(9), 3u);
  EXPECT_EQ(terminal_count(36), 6u);
  EXPECT_EQ(terminal_count(3), 2u);
  EXPECT_EQ(terminal_count(8), 2u);
  EXPECT_EQ(terminal_count(15), 3u);
  EXPECT_EQ(terminal_count(16), 4u);
  EXPECT_THROW(terminal_count(2), std::invalid_argument);
}

TEST(SelectTerminals, UniformScoresTieToLowIds) {
  const auto g = new_complete_graph(9);
  EXPECT_EQ(select_terminals(uniform_scores(9, 0.5), g, kEps).terminals, ids({0, 1, 2}));
}

TEST(SelectTerminals, StarHubIncluded) {
  const std::size_t n = 6;
  auto s = uniform_scores(n, 0.1);
  for (std::size_t u = 1; u < n; ++u) s.integrated(4, u == 4 ? 0 : u) = 0.9;
  const auto g = new_complete_graph(n);
  EXPECT_TRUE(select_terminals(s, g, kEps).contains(AgentId{4}));
}

TEST(SelectTerminals, NineDistinctDegrees) {
  const std::size_t n = 9;
  auto s = uniform_scores(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j) s.integrated(i, j) = 0.1 * static_cast<double>((i * 5) % 9) + 0.01 * static_cast<double>(j);
    }
  }
  oracle::Instance inst{new_complete_graph(n), s};
  const TerminalSet t = select_terminals(s, inst.graph, kEps);
  EXPECT_EQ(t.size(), 3u);
  EXPECT_EQ(t.terminals, oracle::best_terminal_subset(inst, 3, kEps).subset);
}

TEST(SelectTerminals, IgnoresInactiveNodes) {
  auto g = graph_from_edges(4, {{0, 1}, {1, 0}, {1, 2}, {2, 1}});
  g = CommunicationGraph(4, [&] {
    std::vector<std::uint8_t> m(16, 0);
    for (std::size_t i = 0; i < 4; ++i) {
      for (std::size_t j = 0; j < 4; ++j) m[i * 4 + j] = g.mask(i, j);
    }
    return m;
  }(), {true, true, true, false});
  auto s = uniform_scores(4, 0.2);
  s.integrated(3, 0) = 5.0;
  const TerminalSet t = select_terminals(s, g, kEps);
  EXPECT_FALSE(t.contains(AgentId{3}));
}

TEST(Distances, Values) {
  auto s = uniform_scores(3, 1.0);
  s.integrated(1, 2) = 0.0;
  auto g = apply_prune_mask(new_complete_graph(3), EdgeSet{{AgentId{2}, AgentId{0}}});
  const DistanceMetric d = build_distances(s, g, kEps);
  EXPECT_NEAR(d.dist(0, 1), 1.0 / (1.0 + 1e-6), 1e-15);
  EXPECT_NEAR(d.dist(0, 1), 0.999999, 1e-11);
  EXPECT_DOUBLE_EQ(d.dist(1, 2), 1e6);
  EXPECT_EQ(d.dist(2, 0), kUnreachable);
  EXPECT_EQ(d.floored, 0u);
}

TEST(Distances, NegativeScores) {
  auto s = uniform_scores(3, 1.0);
  s.integrated(0, 1) = -0.5;
  const auto g = new_complete_graph(3);
  EXPECT_THROW(build_distances(s, g, kEps), std::domain_error);
  const DistanceMetric d = build_distances(s, g, kEps, NegativeScorePolicy::Floor);
  EXPECT_EQ(d.floored, 1u);
  EXPECT_DOUBLE_EQ(d.dist(0, 1), 1.0 / kEps);
}

TEST(Distances, Antitone) {
  Rng rng = make_rng(21);
  const auto inst = oracle::random_connected_instance(7, rng);
  const DistanceMetric d = build_distances(inst.scores, inst.graph, kEps);
  const EdgeSet edges = inst.graph.active_edges();
  for (const Edge &a : edges) {
    for (const Edge &b : edges) {
      if (inst.scores.integrated(a) > inst.scores.integrated(b)) {
        EXPECT_LT(d.dist(a), d.dist(b));
      }
    }
  }
}

TEST(Cost, Examples) {
  const auto g = new_complete_graph(4);
  const DistanceMetric d = build_distances(uniform_scores(4, 1.0 - kEps), g, kEps);
  ClusterAssignment one{ids({0, 1}), {AgentId{0}, AgentId{0}, AgentId{0}, AgentId{0}}, 0.0};
  EXPECT_EQ(zero_extension_cost(one, d, g), 0.0);
  // {0,2} vs {1,3}: 8 crossing directed edges of distance 1.
  ClusterAssignment split{ids({0, 1}), {AgentId{0}, AgentId{1}, AgentId{0}, AgentId{1}}, 0.0};
  EXPECT_DOUBLE_EQ(zero_extension_cost(split, d, g), 8.0);

  const auto line = graph_from_edges(3, {{0, 1}});
  DistanceMetric two{SquareMatrix<double>(3, kUnreachable)};
  two.dist(0, 1) = 2.0;
  ClusterAssignment cut{ids({0, 1}), {AgentId{0}, AgentId{1}, AgentId{0}}, 0.0};
  EXPECT_EQ(zero_extension_cost(cut, two, line), 2.0);

  ClusterAssignment missing{ids({0, 1}), {AgentId{0}, AgentId{1}, std::nullopt}, 0.0};
  EXPECT_THROW(zero_extension_cost(missing, two, line), std::invalid_argument);
}

TEST(Assign, PathNearestTerminal) {
  // a-b-c with d(a,b) < d(b,c).
  const auto g = graph_from_edges(3, {{0, 1}, {1, 0}, {1, 2}, {2, 1}});
  auto s = uniform_scores(3, 0.0);
  s.integrated(0, 1) = s.integrated(1, 0) = 0.9;
  s.integrated(1, 2) = s.integrated(2, 1) = 0.2;
  const DistanceMetric d = build_distances(s, g, kEps);
  const TerminalSet t{ids({0, 2})};
  const ClusterAssignment h = assign_clusters(g, t, d);
  EXPECT_EQ(h.f[1], AgentId{0});
  EXPECT_EQ(h.f[0], AgentId{0});
  EXPECT_EQ(h.f[2], AgentId{2});
  EXPECT_DOUBLE_EQ(h.cost, 2.0 / (0.2 + kEps));

  // The exact solver cuts the shorter edge instead.
  const ClusterAssignment x = solve_zero_extension_exact(g, t, d);
  EXPECT_EQ(x.f[1], AgentId{2});
  EXPECT_LT(x.cost, h.cost);
}

TEST(Assign, UnreachableFallsBackToDirectLink) {
  // 3 only sends to 2; nothing reaches it except through that one edge.
  const auto g = graph_from_edges(4, {{0, 1}, {1, 0}, {3, 2}});
  const auto s = uniform_scores(4, 0.5);
  const ClusterAssignment h = assign_clusters(g, TerminalSet{ids({0, 2})}, build_distances(s, g, kEps));
  EXPECT_EQ(h.f[1], AgentId{0});
  EXPECT_EQ(h.f[3], AgentId{2});
}

TEST(Exact, TwoCases) {
  const auto g = graph_from_edges(3, {{0, 2}, {2, 0}, {1, 2}, {2, 1}});
  auto s = uniform_scores(3, 0.0);
  s.integrated(0, 2) = s.integrated(2, 0) = 0.8;
  s.integrated(1, 2) = s.integrated(2, 1) = 0.4;
  const DistanceMetric d = build_distances(s, g, kEps);
  const ClusterAssignment x = solve_zero_extension_exact(g, TerminalSet{ids({0, 1})}, d);
  // Node 2 joins the terminal whose link it does not cut: cutting 0-2 (d=1.25) beats 1-2 (d=2.5).
  EXPECT_EQ(x.f[2], AgentId{1});
  EXPECT_DOUBLE_EQ(x.cost, 2.0 / (0.8 + kEps));
}

TEST(Exact, UniformMetricTieBreak) {
  const auto g = new_complete_graph(5);
  const DistanceMetric d = build_distances(uniform_scores(5, 0.5), g, kEps);
  const ClusterAssignment x = solve_zero_extension_exact(g, TerminalSet{ids({1, 3})}, d);
  for (std::size_t v : {0, 2, 4}) EXPECT_EQ(x.f[v], AgentId{1});
}

TEST(Exact, SizeLimit) {
  const auto g = new_complete_graph(11);
  const DistanceMetric d = build_distances(uniform_scores(11, 0.5), g, kEps);
  EXPECT_THROW(solve_zero_extension_exact(g, TerminalSet{ids({0, 1, 2})}, d), std::invalid_argument);
  EXPECT_NO_THROW(solve_zero_extension_exact(g, TerminalSet{ids({0, 1, 2})}, d, 11));
}

// Oracle dominance, self-assignment and greedy == exhaustive subset, n <= 7.
TEST(Property, OracleAgreement) {
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    Rng rng = make_rng(derive_seed(99, seed));
    const std::size_t n = 4 + seed % 4;
    const auto inst = oracle::random_connected_instance(n, rng);
    const TerminalSet t = select_terminals(inst.scores, inst.graph, kEps);
    const auto best = oracle::best_terminal_subset(inst, t.size(), kEps);
    EXPECT_NEAR(oracle::terminal_objective(inst, t.terminals, kEps), best.objective, 1e-9 * best.objective);
    if (best.maximizers == 1) {
      EXPECT_EQ(t.terminals, best.subset);
    }

    const DistanceMetric d = build_distances(inst.scores, inst.graph, kEps);
    const auto h = assign_clusters(inst.graph, t, d);
    const auto x = solve_zero_extension_exact(inst.graph, t, d);
    EXPECT_LE(x.cost, h.cost);
    EXPECT_DOUBLE_EQ(h.cost, zero_extension_cost(h, d, inst.graph));
    for (const AgentId v : t.terminals) {
      EXPECT_EQ(h.f[v.value()], v);
      EXPECT_EQ(x.f[v.value()], v);
    }
  }
}

TEST(Property, TreesWithTwoTerminals) {
  std::size_t agree = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng = make_rng(derive_seed(7, seed));
    const auto inst = oracle::random_tree_instance(6, rng);
    const TerminalSet t{ids({0, 5})};
    const DistanceMetric d = build_distances(inst.scores, inst.graph, kEps);
    const auto h = assign_clusters(inst.graph, t, d);
    const auto x = solve_zero_extension_exact(inst.graph, t, d);
    EXPECT_LE(x.cost, h.cost);
    // A tree with two terminals needs exactly one cut pair on the path between them.
    std::size_t crossing = 0;
    for (const Edge &e : inst.graph.active_edges()) crossing += x.f[e.from.value()] != x.f[e.to.value()] ? 1 : 0;
    EXPECT_EQ(crossing, 2u);
    agree += h == x ? 1 : 0;
  }
  EXPECT_GT(agree, 0u);
  EXPECT_LT(agree, 100u);
}

TEST(Determinism, RepeatedCalls) {
  Rng rng = make_rng(4);
  const auto inst = oracle::random_connected_instance(7, rng);
  const TerminalSet t = select_terminals(inst.scores, inst.graph, kEps);
  const DistanceMetric d = build_distances(inst.scores, inst.graph, kEps);
  EXPECT_EQ(assign_clusters(inst.graph, t, d), assign_clusters(inst.graph, t, d));
  EXPECT_EQ(solve_zero_extension_exact(inst.graph, t, d), solve_zero_extension_exact(inst.graph, t, d));
}

}  // namespace
}  // namespace safesieve
