// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The SafeSieve Authors

#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace safesieve {

/// Index of an agent in [0, n). Never reused after the agent is removed.
struct AgentId {
  std::uint32_t index = 0;

  constexpr AgentId() = default;
  constexpr explicit AgentId(std::size_t i) : index(static_cast<std::uint32_t>(i)) {}

  constexpr std::size_t value() const { return index; }
  friend constexpr auto operator<=>(AgentId, AgentId) = default;
};

/// Directed message channel from `from` to `to`.
struct Edge {
  AgentId from;
  AgentId to;

  friend constexpr auto operator<=>(const Edge &, const Edge &) = default;
};

using EdgeSet = std::vector<Edge>;

/// Dense row-major n x n matrix.
template <class T>
class SquareMatrix {
public:
  SquareMatrix() = default;
  explicit SquareMatrix(std::size_t n, T fill = T{}) : n_(n), data_(n * n, fill) {}

  std::size_t size() const { return n_; }

  T &operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
  const T &operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }
  T &operator()(Edge e) { return (*this)(e.from.value(), e.to.value()); }
  const T &operator()(Edge e) const { return (*this)(e.from.value(), e.to.value()); }

  std::span<const T> row(std::size_t i) const { return {data_.data() + i * n_, n_}; }
  const std::vector<T> &data() const { return data_; }

  friend bool operator==(const SquareMatrix &, const SquareMatrix &) = default;

private:
  std::size_t n_ = 0;
  std::vector<T> data_;
};

/// Which incident mask entries must be zero for a node to count as isolated.
enum class IsolationRule {
  Bidirectional, ///< no outgoing and no incoming edges
  OutDegree,     ///< no outgoing edges (literal reading of the node-update rule)
};

/// Directed communication graph: a binary mask over candidate links plus
/// node liveness. Mutations return new values; masks only ever lose entries.
class CommunicationGraph {
public:
  CommunicationGraph() = default;

  /// Validating constructor used by deserialization and tests.
  CommunicationGraph(std::size_t n, std::vector<std::uint8_t> mask, std::vector<bool> active);

  std::size_t size() const { return n_; }

  bool is_active(AgentId v) const { return active_[v.value()]; }
  std::uint8_t mask(std::size_t i, std::size_t j) const { return mask_[i * n_ + j]; }
  bool has_edge(Edge e) const;

  std::vector<AgentId> active_nodes() const;
  std::size_t active_node_count() const;

  /// Active edges in row-major order.
  EdgeSet active_edges() const;
  std::size_t active_edge_count() const;

  std::size_t out_degree(AgentId v) const;
  std::size_t in_degree(AgentId v) const;

  friend bool operator==(const CommunicationGraph &, const CommunicationGraph &) = default;

private:
  friend CommunicationGraph apply_prune_mask(const CommunicationGraph &, std::span<const Edge>);
  friend struct IsolationResult drop_isolated_nodes(const CommunicationGraph &, IsolationRule);

  std::size_t n_ = 0;
  std::vector<std::uint8_t> mask_;
  std::vector<bool> active_;
};

struct IsolationResult {
  CommunicationGraph graph;
  std::vector<AgentId> removed;
};

/// Complete directed graph without self-loops. Throws std::invalid_argument for n < 3.
CommunicationGraph new_complete_graph(std::size_t n);

EdgeSet active_edges(const CommunicationGraph &g);

/// Zeroes the mask entry of every edge in `prune`. Throws std::logic_error if
/// any of them is not currently active.
CommunicationGraph apply_prune_mask(const CommunicationGraph &g, std::span<const Edge> prune);

/// Removes isolated nodes if more than two nodes survive; otherwise returns
/// the graph unchanged with an empty removal set.
IsolationResult drop_isolated_nodes(const CommunicationGraph &g,
                                    IsolationRule rule = IsolationRule::Bidirectional);

/// Throws std::invalid_argument on duplicate pairs or self-loops.
void validate_edge_set(std::span<const Edge> edges, std::size_t n);

} // namespace safesieve
