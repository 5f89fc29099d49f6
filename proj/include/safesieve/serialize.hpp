// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The SafeSieve Authors

#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "safesieve/clustering.hpp"
#include "safesieve/engine.hpp"
#include "safesieve/graph.hpp"
#include "safesieve/scoring.hpp"
#include "safesieve/simulator.hpp"

namespace safesieve {

using Json = nlohmann::ordered_json;

/// {"n": int, "active_nodes": [int], "mask": [[0|1]]}
Json graph_to_json(const CommunicationGraph &g);
CommunicationGraph graph_from_json(const Json &j);

/// {"terminals": [int], "f": {"agent": terminal}, "cost": real}
Json assignment_to_json(const ClusterAssignment &a);
ClusterAssignment assignment_from_json(const Json &j, std::size_t n);

Json edges_to_json(const EdgeSet &edges);
EdgeSet edges_from_json(const Json &j);

Json event_to_json(const PruneEvent &e);
PruneEvent event_from_json(const Json &j, std::size_t n);

Json matrix_to_json(const SquareMatrix<double> &m);

/// One event per line.
void write_event_log(std::ostream &out, const std::vector<PruneEvent> &events);
std::vector<PruneEvent> read_event_log(std::istream &in, std::size_t n);

/// Header: batch,accuracy,tokens,cost,active_edges
void write_metrics_csv(std::ostream &out, const TrialMetrics &m);
std::vector<BatchMetrics> read_metrics_csv(std::istream &in);

/// {"agents": [{"id": int, "role": str, "embedding": [real]}]}
std::vector<AgentProfile> load_embeddings(const std::filesystem::path &path);
std::vector<AgentProfile> embeddings_from_json(const Json &j);
Json embeddings_to_json(const std::vector<AgentProfile> &profiles);

/// {"i,j": real}
std::map<std::pair<std::uint32_t, std::uint32_t>, double>
load_expert_scores(const std::filesystem::path &path);
std::map<std::pair<std::uint32_t, std::uint32_t>, double> expert_scores_from_json(const Json &j);

Json trial_summary_to_json(const TrialResult &trial);
Json comparison_to_json(const ComparisonReport &report);

} // namespace safesieve
