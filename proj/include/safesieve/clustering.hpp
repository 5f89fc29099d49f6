// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The SafeSieve Authors

#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

#include "safesieve/graph.hpp"
#include "safesieve/scoring.hpp"

namespace safesieve {

inline constexpr double kUnreachable = std::numeric_limits<double>::infinity();

/// Cluster centers, ascending by id.
struct TerminalSet {
  std::vector<AgentId> terminals;

  bool contains(AgentId v) const;
  std::size_t size() const { return terminals.size(); }
};

/// Inverse-score distances between agents: 1/(E + eps) on active edges,
/// infinity elsewhere.
struct DistanceMetric {
  SquareMatrix<double> dist;
  std::size_t floored = 0; ///< active edges whose score was floored to 0
};

enum class NegativeScorePolicy {
  Reject, ///< throw when E + eps <= 0 on an active edge
  Floor,  ///< treat scores <= -eps as 0 and count them
};

struct ClusterAssignment {
  std::vector<AgentId> terminals;
  /// Terminal of each agent; empty for inactive agents.
  std::vector<std::optional<AgentId>> f;
  double cost = 0.0;

  friend bool operator==(const ClusterAssignment &, const ClusterAssignment &) = default;
};

/// max(2, min(floor(sqrt(n)), floor(n/3))). Throws for n < 3.
std::size_t terminal_count(std::size_t n);

/// Sum of (E_vu + eps) over the active out-edges of v.
double terminal_weight(const EdgeScoreMatrix &scores, const CommunicationGraph &g, AgentId v,
                       double epsilon);

/// The terminal_count(active) nodes of highest terminal weight, ties to the
/// lower id. The objective is separable, so this is the exact subset optimum.
TerminalSet select_terminals(const EdgeScoreMatrix &scores, const CommunicationGraph &g,
                             double epsilon);

DistanceMetric build_distances(const EdgeScoreMatrix &scores, const CommunicationGraph &g,
                               double epsilon,
                               NegativeScorePolicy policy = NegativeScorePolicy::Reject);

/// Sum of the distances of active edges whose endpoints land on different
/// terminals. Throws if an active node is unassigned.
double zero_extension_cost(const ClusterAssignment &assignment, const DistanceMetric &metric,
                           const CommunicationGraph &g);

/// Nearest-terminal rounding: every agent goes to the terminal closest by
/// shortest path over the symmetrized metric min(d_ij, d_ji).
ClusterAssignment assign_clusters(const CommunicationGraph &g, const TerminalSet &terminals,
                                  const DistanceMetric &metric);

/// Exhaustive minimum over all terminal labelings of the non-terminals; ties
/// go to the lexicographically smallest labeling. Throws when the active node
/// count exceeds `n_limit`.
ClusterAssignment solve_zero_extension_exact(const CommunicationGraph &g,
                                             const TerminalSet &terminals,
                                             const DistanceMetric &metric,
                                             std::size_t n_limit = 10);

} // namespace safesieve
