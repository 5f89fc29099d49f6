// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The SafeSieve Authors

#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "safesieve/graph.hpp"
#include "safesieve/rng.hpp"
#include "safesieve/scoring.hpp"

// Brute-force references for the clustering module. Nothing here calls into
// the heuristics it is used to check.
namespace safesieve::oracle {

struct Instance {
  CommunicationGraph graph;
  EdgeScoreMatrix scores;
};

/// Complete graph on n nodes with uniform random integrated scores in
/// [0.05, 1), thinned at random while keeping the underlying undirected graph
/// connected.
Instance random_connected_instance(std::size_t n, Rng &rng);

/// Random spanning tree with both directions of every tree edge active.
Instance random_tree_instance(std::size_t n, Rng &rng);

/// Connectivity objective of a candidate terminal set, evaluated exactly as
/// written: sum over v in S, u in V of 1 / (E_vu + eps)^-1 on active edges.
double terminal_objective(const Instance &inst, const std::vector<AgentId> &subset, double epsilon);

struct SubsetOptimum {
  std::vector<AgentId> subset; ///< first maximizer in lexicographic order
  double objective = 0.0;
  std::size_t maximizers = 0; ///< subsets within 1e-12 relative of the optimum
};

/// Enumerates every k-subset of the active nodes.
SubsetOptimum best_terminal_subset(const Instance &inst, std::size_t k, double epsilon);

} // namespace safesieve::oracle
