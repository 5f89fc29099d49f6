// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The SafeSieve Authors

#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "safesieve/graph.hpp"

namespace safesieve {

/// Which edges of a correct episode earn a success credit.
enum class CreditPolicy {
  ActiveEdge,     ///< every edge used during the episode
  PathRestricted, ///< only used edges on a directed path to the answering agent
};

struct ScoringConfig {
  double gamma = 0.5;    ///< weight of embedding cosine vs quantized expert score
  double alpha0 = 1.0;   ///< initial semantic weight
  double beta0 = 0.5;    ///< initial historical weight
  double beta_max = 2.0; ///< historical weight at the horizon
  std::uint64_t horizon = 300;
  double epsilon = 1e-6;
  CreditPolicy credit_policy = CreditPolicy::ActiveEdge;

  /// Throws std::invalid_argument naming the violated constraint.
  void validate() const;
  friend bool operator==(const ScoringConfig &, const ScoringConfig &) = default;
};

struct AgentProfile {
  AgentId id;
  std::string role;
  std::vector<double> embedding;
};

struct PairAssessment {
  double cosine = 0.0; ///< in [-1, 1]
  double expert = 0.0; ///< raw expert compatibility in [0, 1]
};

/// Source of pairwise compatibility judgements. Implementations must be
/// deterministic for fixed inputs; expert scores need not be symmetric.
class CompatibilityScorer {
public:
  virtual ~CompatibilityScorer() = default;
  virtual PairAssessment assess(const AgentProfile &from, const AgentProfile &to) const = 0;
};

/// Deterministic stand-in for an expert model: scores are a hash of the two
/// role labels and the seed, mapped into a band. Agents listed as suspicious
/// get scores from the low band regardless of the role they present.
class SyntheticScorer final : public CompatibilityScorer {
public:
  struct Band {
    double lo = 0.0;
    double hi = 1.0;
  };

  explicit SyntheticScorer(std::uint64_t seed, Band benign = {0.0, 1.0},
                           std::set<AgentId> suspicious = {}, Band suspicious_band = {0.0, 0.4});

  PairAssessment assess(const AgentProfile &from, const AgentProfile &to) const override;

private:
  std::uint64_t seed_;
  Band benign_;
  std::set<AgentId> suspicious_;
  Band suspicious_band_;
};

/// Expert scores read from a precomputed table keyed by directed agent pair.
class TableScorer final : public CompatibilityScorer {
public:
  explicit TableScorer(std::map<std::pair<std::uint32_t, std::uint32_t>, double> scores);

  PairAssessment assess(const AgentProfile &from, const AgentProfile &to) const override;

private:
  std::map<std::pair<std::uint32_t, std::uint32_t>, double> scores_;
};

/// Cosine of two equal-length vectors. Throws on zero norm or length mismatch.
double cosine_similarity(std::span<const double> a, std::span<const double> b);

/// Maps [0,1] onto the five midpoint levels {0.1, 0.3, 0.5, 0.7, 0.9}.
double quantize_expert_score(double x);

double semantic_compatibility(const AgentProfile &from, const AgentProfile &to,
                              const CompatibilityScorer &scorer, const ScoringConfig &cfg);

struct EdgeScoreMatrix {
  SquareMatrix<double> semantic;
  SquareMatrix<double> integrated;
  SquareMatrix<double> normalized;
};

/// Scores every ordered pair of distinct agents. Profiles must carry ids 0..n-1
/// in order and embeddings of a common dimension.
EdgeScoreMatrix init_compatibility_matrix(std::span<const AgentProfile> profiles,
                                          const CompatibilityScorer &scorer,
                                          const ScoringConfig &cfg);

class HistoryLedger {
public:
  HistoryLedger() = default;
  explicit HistoryLedger(std::size_t n) : success_(n, 0) {}

  std::uint64_t successes(Edge e) const { return success_(e); }
  std::uint64_t total_records() const { return total_records_; }
  std::size_t size() const { return success_.size(); }
  const SquareMatrix<std::uint64_t> &success_counts() const { return success_; }

  friend void record_episode_outcome(HistoryLedger &ledger, std::span<const Edge> credited,
                                     bool correct);

private:
  SquareMatrix<std::uint64_t> success_;
  std::uint64_t total_records_ = 0;
};

/// Adds one success to every credited edge when the episode was correct.
void record_episode_outcome(HistoryLedger &ledger, std::span<const Edge> credited, bool correct);

/// Edges of `used` that earn credit under `policy`. Path-restricted credit keeps
/// the edges from which `answerer` is reachable through used edges.
EdgeSet credited_edges(std::span<const Edge> used, std::optional<AgentId> answerer,
                       CreditPolicy policy, std::size_t n);

double historical_complementarity(const HistoryLedger &ledger, Edge edge,
                                  std::span<const Edge> active, std::size_t n, double epsilon);

/// Time-interpolated score. `beta_correction` scales the historical
/// coefficient after post-prune rescaling; t beyond the horizon is clamped.
double integrated_edge_score(std::uint64_t t, const ScoringConfig &cfg, double s_compat,
                             double c_hist, double beta_correction = 1.0);

/// Recomputes the integrated matrix over the active edges; other entries are 0.
void refresh_integrated_scores(EdgeScoreMatrix &scores, const HistoryLedger &ledger,
                               std::span<const Edge> active, std::uint64_t t,
                               const ScoringConfig &cfg, double beta_correction);

struct NormalizationStats {
  double mu = 0.0;
  double sigma = 0.0;
  double range_before = 0.0;
  double range_after = 0.0;
};

struct NormalizationResult {
  EdgeScoreMatrix scores;
  NormalizationStats stats;
  double beta_hat = 0.0;
};

/// max - min of the integrated scores over `edges`; 0 for fewer than two edges.
double score_range(const SquareMatrix<double> &integrated, std::span<const Edge> edges);

/// Population z-scores of the integrated scores over `active`, written to the
/// normalized matrix (0 elsewhere). Throws if fewer than two edges are active.
std::pair<SquareMatrix<double>, NormalizationStats>
normalize_scores(const EdgeScoreMatrix &scores, std::span<const Edge> active, double epsilon);

/// Z-normalizes over the pre-prune edge set and rescales beta by the ratio of
/// the integrated score range before and after the prune.
NormalizationResult normalize_and_rescale(const EdgeScoreMatrix &scores,
                                          std::span<const Edge> active_before,
                                          std::span<const Edge> active_after, double beta_current,
                                          double epsilon);

} // namespace safesieve
