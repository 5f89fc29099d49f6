// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The SafeSieve Authors

#include "safesieve/graph.hpp"

#include <algorithm>
#include <stdexcept>

#include <fmt/format.h>

namespace safesieve {

CommunicationGraph::CommunicationGraph(std::size_t n, std::vector<std::uint8_t> mask,
                                       std::vector<bool> active)
    : n_(n), mask_(std::move(mask)), active_(std::move(active)) {
  if (mask_.size() != n_ * n_ || active_.size() != n_) {
    throw std::invalid_argument(fmt::format("graph: mask must be {0}x{0} and liveness length {0}", n_));
  }
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = 0; j < n_; ++j) {
      const auto m = mask_[i * n_ + j];
      if (m > 1) {
        throw std::invalid_argument(fmt::format("graph: mask entry ({},{}) is not binary", i, j));
      }
      if (m == 1 && i == j) {
        throw std::invalid_argument(fmt::format("graph: self-loop at {}", i));
      }
      if (m == 1 && (!active_[i] || !active_[j])) {
        throw std::invalid_argument(fmt::format("graph: edge ({},{}) touches an inactive node", i, j));
      }
    }
  }
}

bool CommunicationGraph::has_edge(Edge e) const {
  const auto i = e.from.value();
  const auto j = e.to.value();
  if (i >= n_ || j >= n_) {
    return false;
  }
  return mask_[i * n_ + j] == 1 && active_[i] && active_[j];
}

std::vector<AgentId> CommunicationGraph::active_nodes() const {
  std::vector<AgentId> out;
  for (std::size_t v = 0; v < n_; ++v) {
    if (active_[v]) {
      out.emplace_back(v);
    }
  }
  return out;
}

std::size_t CommunicationGraph::active_node_count() const {
  return static_cast<std::size_t>(std::count(active_.begin(), active_.end(), true));
}

EdgeSet CommunicationGraph::active_edges() const {
  EdgeSet out;
  for (std::size_t i = 0; i < n_; ++i) {
    if (!active_[i]) {
      continue;
    }
    for (std::size_t j = 0; j < n_; ++j) {
      if (mask_[i * n_ + j] == 1 && active_[j]) {
        out.push_back({AgentId{i}, AgentId{j}});
      }
    }
  }
  return out;
}

std::size_t CommunicationGraph::active_edge_count() const {
  std::size_t count = 0;
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = 0; j < n_; ++j) {
      count += (mask_[i * n_ + j] == 1 && active_[i] && active_[j]) ? 1 : 0;
    }
  }
  return count;
}

std::size_t CommunicationGraph::out_degree(AgentId v) const {
  std::size_t d = 0;
  for (std::size_t j = 0; j < n_; ++j) {
    d += has_edge({v, AgentId{j}}) ? 1 : 0;
  }
  return d;
}

std::size_t CommunicationGraph::in_degree(AgentId v) const {
  std::size_t d = 0;
  for (std::size_t i = 0; i < n_; ++i) {
    d += has_edge({AgentId{i}, v}) ? 1 : 0;
  }
  return d;
}

CommunicationGraph new_complete_graph(std::size_t n) {
  if (n < 3) {
    throw std::invalid_argument(fmt::format("graph: need at least 3 agents, got {}", n));
  }
  std::vector<std::uint8_t> mask(n * n, 1);
  for (std::size_t i = 0; i < n; ++i) {
    mask[i * n + i] = 0;
  }
  return CommunicationGraph(n, std::move(mask), std::vector<bool>(n, true));
}

EdgeSet active_edges(const CommunicationGraph &g) { return g.active_edges(); }

CommunicationGraph apply_prune_mask(const CommunicationGraph &g, std::span<const Edge> prune) {
  CommunicationGraph out = g;
  for (const Edge &e : prune) {
    if (!out.has_edge(e)) {
      throw std::logic_error(
          fmt::format("graph: cannot prune inactive edge ({},{})", e.from.index, e.to.index));
    }
    out.mask_[e.from.value() * out.n_ + e.to.value()] = 0;
  }
  return out;
}

IsolationResult drop_isolated_nodes(const CommunicationGraph &g, IsolationRule rule) {
  std::vector<AgentId> isolated;
  for (const AgentId v : g.active_nodes()) {
    const bool no_out = g.out_degree(v) == 0;
    const bool no_in = g.in_degree(v) == 0;
    if (no_out && (rule == IsolationRule::OutDegree || no_in)) {
      isolated.push_back(v);
    }
  }
  if (isolated.empty() || g.active_node_count() - isolated.size() <= 2) {
    return {g, {}};
  }

  CommunicationGraph out = g;
  for (const AgentId v : isolated) {
    const auto idx = v.value();
    out.active_[idx] = false;
    // Out-degree isolation can leave incoming entries behind.
    for (std::size_t u = 0; u < out.n_; ++u) {
      out.mask_[idx * out.n_ + u] = 0;
      out.mask_[u * out.n_ + idx] = 0;
    }
  }
  return {std::move(out), std::move(isolated)};
}

void validate_edge_set(std::span<const Edge> edges, std::size_t n) {
  std::vector<Edge> sorted(edges.begin(), edges.end());
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    const Edge &e = sorted[k];
    if (e.from == e.to) {
      throw std::invalid_argument(fmt::format("edge set: self-loop at {}", e.from.index));
    }
    if (e.from.value() >= n || e.to.value() >= n) {
      throw std::invalid_argument(
          fmt::format("edge set: ({},{}) out of range for n={}", e.from.index, e.to.index, n));
    }
    if (k > 0 && sorted[k - 1] == e) {
      throw std::invalid_argument(
          fmt::format("edge set: duplicate ({},{})", e.from.index, e.to.index));
    }
  }
}

} // namespace safesieve
