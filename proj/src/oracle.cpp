// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The SafeSieve Authors

#include "safesieve/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace safesieve::oracle {

namespace {

EdgeScoreMatrix random_scores(std::size_t n, Rng &rng) {
  std::uniform_real_distribution<double> score(0.05, 1.0);
  EdgeScoreMatrix s{SquareMatrix<double>(n), SquareMatrix<double>(n), SquareMatrix<double>(n)};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      s.integrated(i, j) = score(rng);
      s.semantic(i, j) = s.integrated(i, j);
    }
  }
  return s;
}

// Random labelled tree: attach each node to a uniformly chosen earlier node
// of a random permutation.
std::vector<std::pair<std::size_t, std::size_t>> random_tree(std::size_t n, Rng &rng) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t k = 1; k < n; ++k) {
    std::uniform_int_distribution<std::size_t> parent(0, k - 1);
    out.emplace_back(order[parent(rng)], order[k]);
  }
  return out;
}

} // namespace

Instance random_connected_instance(std::size_t n, Rng &rng) {
  if (n < 3) throw std::invalid_argument("oracle: need at least 3 nodes");
  std::vector<std::uint8_t> mask(n * n, 0);
  std::bernoulli_distribution keep(0.5);
  std::bernoulli_distribution forward(0.5);
  for (const auto &[a, b] : random_tree(n, rng)) {
    // One direction of every tree edge survives, so the graph stays weakly connected.
    if (forward(rng)) mask[a * n + b] = 1; else mask[b * n + a] = 1;
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j && keep(rng)) mask[i * n + j] = 1;
    }
  }
  return {CommunicationGraph(n, std::move(mask), std::vector<bool>(n, true)), random_scores(n, rng)};
}

Instance random_tree_instance(std::size_t n, Rng &rng) {
  if (n < 3) throw std::invalid_argument("oracle: need at least 3 nodes");
  std::vector<std::uint8_t> mask(n * n, 0);
  for (const auto &[a, b] : random_tree(n, rng)) {
    mask[a * n + b] = 1;
    mask[b * n + a] = 1;
  }
  return {CommunicationGraph(n, std::move(mask), std::vector<bool>(n, true)), random_scores(n, rng)};
}

double terminal_objective(const Instance &inst, const std::vector<AgentId> &subset, double epsilon) {
  double total = 0.0;
  const std::size_t n = inst.graph.size();
  for (const AgentId v : subset) {
    for (std::size_t u = 0; u < n; ++u) {
      if (inst.graph.mask(v.value(), u) == 1 && inst.graph.is_active(AgentId{u})) {
        total += 1.0 / std::pow(inst.scores.integrated(v.value(), u) + epsilon, -1.0);
      }
    }
  }
  return total;
}

SubsetOptimum best_terminal_subset(const Instance &inst, std::size_t k, double epsilon) {
  const std::vector<AgentId> nodes = inst.graph.active_nodes();
  if (k == 0 || k > nodes.size()) throw std::invalid_argument("oracle: bad subset size");

  // Lexicographic k-combinations via a selection mask.
  std::vector<bool> pick(nodes.size(), false);
  std::fill(pick.begin(), pick.begin() + static_cast<std::ptrdiff_t>(k), true);
  std::vector<std::pair<double, std::vector<AgentId>>> all;
  do {
    std::vector<AgentId> subset;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      if (pick[i]) subset.push_back(nodes[i]);
    }
    all.emplace_back(terminal_objective(inst, subset, epsilon), std::move(subset));
  } while (std::prev_permutation(pick.begin(), pick.end()));

  SubsetOptimum best;
  for (const auto &[value, subset] : all) {
    if (best.subset.empty() || value > best.objective) {
      best.objective = value;
      best.subset = subset;
    }
  }
  for (const auto &entry : all) {
    if (std::abs(entry.first - best.objective) <= 1e-12 * std::abs(best.objective)) {
      ++best.maximizers;
    }
  }
  return best;
}

} // namespace safesieve::oracle
