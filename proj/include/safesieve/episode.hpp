// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The SafeSieve Authors

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "safesieve/graph.hpp"

namespace safesieve {

/// Outcome of one task episode as seen by the pruning engine.
struct EpisodeResult {
  bool correct = false;
  /// Active edges whose messages were used; the engine credits these.
  EdgeSet active_edges_used;
  /// Tokens emitted by each agent, indexed by AgentId.
  std::vector<std::uint64_t> tokens_by_agent;
  std::uint32_t rounds = 0;
  /// Agent that produced the final answer, if any.
  std::optional<AgentId> answerer;
};

} // namespace safesieve
