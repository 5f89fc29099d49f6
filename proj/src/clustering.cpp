// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The SafeSieve Authors

#include "safesieve/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <queue>
#include <stdexcept>
#include <utility>

#include <fmt/format.h>

namespace safesieve {

bool TerminalSet::contains(AgentId v) const {
  return std::binary_search(terminals.begin(), terminals.end(), v);
}

std::size_t terminal_count(std::size_t n) {
  if (n < 3) {
    throw std::invalid_argument(fmt::format("terminal count: need at least 3 agents, got {}", n));
  }
  auto root = static_cast<std::size_t>(std::sqrt(static_cast<double>(n)));
  while ((root + 1) * (root + 1) <= n) ++root;
  while (root * root > n) --root;
  return std::max<std::size_t>(2, std::min(root, n / 3));
}

double terminal_weight(const EdgeScoreMatrix &scores, const CommunicationGraph &g, AgentId v,
                       double epsilon) {
  double w = 0.0;
  for (std::size_t u = 0; u < g.size(); ++u) {
    if (g.has_edge({v, AgentId{u}})) {
      w += scores.integrated(v.value(), u) + epsilon;
    }
  }
  return w;
}

TerminalSet select_terminals(const EdgeScoreMatrix &scores, const CommunicationGraph &g,
                             double epsilon) {
  const std::vector<AgentId> nodes = g.active_nodes();
  if (nodes.size() < 3) {
    throw std::invalid_argument("select terminals: need at least 3 active agents");
  }
  std::vector<std::pair<double, AgentId>> ranked;
  ranked.reserve(nodes.size());
  for (const AgentId v : nodes) {
    ranked.emplace_back(terminal_weight(scores, g, v, epsilon), v);
  }
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto &a, const auto &b) { return a.first > b.first; });

  TerminalSet out;
  const std::size_t k = terminal_count(nodes.size());
  for (std::size_t i = 0; i < k; ++i) {
    out.terminals.push_back(ranked[i].second);
  }
  std::sort(out.terminals.begin(), out.terminals.end());
  return out;
}

DistanceMetric build_distances(const EdgeScoreMatrix &scores, const CommunicationGraph &g,
                               double epsilon, NegativeScorePolicy policy) {
  const std::size_t n = g.size();
  DistanceMetric out{SquareMatrix<double>(n, kUnreachable), 0};
  for (const Edge &e : g.active_edges()) {
    double score = scores.integrated(e);
    if (score + epsilon <= 0.0) {
      if (policy == NegativeScorePolicy::Reject) {
        throw std::domain_error(fmt::format("distances: score {} on edge ({},{}) is not above -eps",
                                            score, e.from.index, e.to.index));
      }
      score = 0.0;
      ++out.floored;
    }
    out.dist(e) = 1.0 / (score + epsilon);
  }
  return out;
}

double zero_extension_cost(const ClusterAssignment &assignment, const DistanceMetric &metric,
                           const CommunicationGraph &g) {
  double cost = 0.0;
  for (const AgentId v : g.active_nodes()) {
    if (v.value() >= assignment.f.size() || !assignment.f[v.value()]) {
      throw std::invalid_argument(fmt::format("0-extension cost: agent {} unassigned", v.index));
    }
  }
  for (const Edge &e : g.active_edges()) {
    if (*assignment.f[e.from.value()] != *assignment.f[e.to.value()]) {
      cost += metric.dist(e);
    }
  }
  return cost;
}

namespace {

std::vector<double> shortest_paths_from(const CommunicationGraph &g, const DistanceMetric &metric,
                                        AgentId source) {
  const std::size_t n = g.size();
  std::vector<double> best(n, kUnreachable);
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> frontier;
  best[source.value()] = 0.0;
  frontier.emplace(0.0, source.value());
  while (!frontier.empty()) {
    const auto [d, v] = frontier.top();
    frontier.pop();
    if (d > best[v]) continue;
    for (std::size_t u = 0; u < n; ++u) {
      const double w = std::min(metric.dist(v, u), metric.dist(u, v));
      if (u == v || w == kUnreachable) continue;
      if (d + w < best[u]) {
        best[u] = d + w;
        frontier.emplace(best[u], u);
      }
    }
  }
  return best;
}

void check_terminals(const CommunicationGraph &g, const TerminalSet &terminals) {
  if (terminals.size() < 2) {
    throw std::invalid_argument("clustering: need at least two terminals");
  }
  for (std::size_t k = 0; k < terminals.size(); ++k) {
    const AgentId t = terminals.terminals[k];
    if (t.value() >= g.size() || !g.is_active(t)) {
      throw std::invalid_argument(fmt::format("clustering: terminal {} is not active", t.index));
    }
    if (k > 0 && !(terminals.terminals[k - 1] < t)) {
      throw std::invalid_argument("clustering: terminals must be strictly ascending");
    }
  }
}

} // namespace

ClusterAssignment assign_clusters(const CommunicationGraph &g, const TerminalSet &terminals,
                                  const DistanceMetric &metric) {
  check_terminals(g, terminals);
  const std::size_t n = g.size();

  std::vector<std::vector<double>> from_terminal;
  for (const AgentId t : terminals.terminals) {
    from_terminal.push_back(shortest_paths_from(g, metric, t));
  }

  ClusterAssignment out;
  out.terminals = terminals.terminals;
  out.f.assign(n, std::nullopt);
  for (const AgentId v : g.active_nodes()) {
    if (terminals.contains(v)) {
      out.f[v.value()] = v;
      continue;
    }
    std::size_t best = 0;
    for (std::size_t k = 1; k < terminals.size(); ++k) {
      if (from_terminal[k][v.value()] < from_terminal[best][v.value()]) best = k;
    }
    if (from_terminal[best][v.value()] == kUnreachable) {
      // No path to any terminal: fall back to the closest direct link, or the
      // first terminal when there is none.
      for (std::size_t k = 1; k < terminals.size(); ++k) {
        const auto t = terminals.terminals[k].value();
        const auto b = terminals.terminals[best].value();
        const double dk = std::min(metric.dist(v.value(), t), metric.dist(t, v.value()));
        const double db = std::min(metric.dist(v.value(), b), metric.dist(b, v.value()));
        if (dk < db) best = k;
      }
    }
    out.f[v.value()] = terminals.terminals[best];
  }
  out.cost = zero_extension_cost(out, metric, g);
  return out;
}

ClusterAssignment solve_zero_extension_exact(const CommunicationGraph &g,
                                             const TerminalSet &terminals,
                                             const DistanceMetric &metric, std::size_t n_limit) {
  check_terminals(g, terminals);
  const std::vector<AgentId> nodes = g.active_nodes();
  if (nodes.size() > n_limit) {
    throw std::invalid_argument(fmt::format(
        "exact 0-extension: {} active agents exceeds limit {}", nodes.size(), n_limit));
  }

  std::vector<AgentId> free_nodes;
  for (const AgentId v : nodes) {
    if (!terminals.contains(v)) free_nodes.push_back(v);
  }

  ClusterAssignment current;
  current.terminals = terminals.terminals;
  current.f.assign(g.size(), std::nullopt);
  for (const AgentId t : terminals.terminals) current.f[t.value()] = t;

  // Odometer over labelings; the lowest agent id is the most significant
  // digit, so the first minimum found is the lexicographically smallest.
  std::vector<std::size_t> digits(free_nodes.size(), 0);
  std::optional<ClusterAssignment> best;
  while (true) {
    for (std::size_t k = 0; k < free_nodes.size(); ++k) {
      current.f[free_nodes[k].value()] = terminals.terminals[digits[k]];
    }
    current.cost = zero_extension_cost(current, metric, g);
    if (!best || current.cost < best->cost) best = current;

    std::size_t pos = free_nodes.size();
    while (pos > 0) {
      --pos;
      if (++digits[pos] < terminals.size()) break;
      digits[pos] = 0;
      if (pos == 0) return *best;
    }
    if (free_nodes.empty()) return *best;
  }
}

} // namespace safesieve
