// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The SafeSieve Authors

#include "safesieve/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>

#include <fmt/format.h>

#include "safesieve/rng.hpp"

namespace safesieve {

void ScoringConfig::validate() const {
  auto fail = [](const char *what) { throw std::invalid_argument(what); };
  if (!(gamma >= 0.0 && gamma <= 1.0)) fail("scoring.gamma must satisfy gamma ∈ [0,1]");
  if (!(alpha0 > 0.0)) fail("scoring.alpha0 must satisfy alpha0 > 0");
  if (!(beta0 >= 0.0)) fail("scoring.beta0 must satisfy beta0 ≥ 0");
  if (!(beta_max > beta0)) fail("scoring.beta_max must satisfy beta_max > beta0");
  if (horizon == 0) fail("scoring.horizon must satisfy horizon > 0");
  if (!(epsilon > 0.0)) fail("scoring.epsilon must satisfy epsilon > 0");
}

// ---------------------------------------------------------------------------
// Scorers

SyntheticScorer::SyntheticScorer(std::uint64_t seed, Band benign, std::set<AgentId> suspicious,
                                 Band suspicious_band)
    : seed_(seed), benign_(benign), suspicious_(std::move(suspicious)),
      suspicious_band_(suspicious_band) {
  for (const Band b : {benign_, suspicious_band_}) {
    if (!(b.lo >= 0.0 && b.lo <= b.hi && b.hi <= 1.0)) {
      throw std::invalid_argument("synthetic scorer: bands must satisfy 0 ≤ lo ≤ hi ≤ 1");
    }
  }
}

PairAssessment SyntheticScorer::assess(const AgentProfile &from, const AgentProfile &to) const {
  const std::uint64_t h =
      derive_seed(derive_seed(seed_, stream_tag(from.role)), stream_tag(to.role));
  const double u = unit_interval(h);
  const bool flagged = suspicious_.contains(from.id) || suspicious_.contains(to.id);
  const Band b = flagged ? suspicious_band_ : benign_;
  // u < 1, so the upper end of the band is open.
  const double expert = b.lo + u * (b.hi - b.lo);
  return {cosine_similarity(from.embedding, to.embedding), std::min(expert, 1.0)};
}

TableScorer::TableScorer(std::map<std::pair<std::uint32_t, std::uint32_t>, double> scores)
    : scores_(std::move(scores)) {
  for (const auto &[key, v] : scores_) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw std::invalid_argument(
          fmt::format("expert table: score for ({},{}) outside [0,1]", key.first, key.second));
    }
  }
}

PairAssessment TableScorer::assess(const AgentProfile &from, const AgentProfile &to) const {
  const auto it = scores_.find({from.id.index, to.id.index});
  if (it == scores_.end()) {
    throw std::out_of_range(
        fmt::format("expert table: no score for pair ({},{})", from.id.index, to.id.index));
  }
  return {cosine_similarity(from.embedding, to.embedding), it->second};
}

// ---------------------------------------------------------------------------
// Semantic initialization

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument(
        fmt::format("cosine: dimension mismatch ({} vs {})", a.size(), b.size()));
  }
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    dot += a[k] * b[k];
    na += a[k] * a[k];
    nb += b[k] * b[k];
  }
  if (na == 0.0 || nb == 0.0) {
    throw std::invalid_argument("cosine: zero-norm embedding");
  }
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

double quantize_expert_score(double x) {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw std::invalid_argument(fmt::format("quantize: expert score {} outside [0,1]", x));
  }
  if (x < 0.2) return 0.1;
  if (x < 0.4) return 0.3;
  if (x < 0.6) return 0.5;
  if (x < 0.8) return 0.7;
  return 0.9;
}

double semantic_compatibility(const AgentProfile &from, const AgentProfile &to,
                              const CompatibilityScorer &scorer, const ScoringConfig &cfg) {
  const PairAssessment a = scorer.assess(from, to);
  return cfg.gamma * a.cosine + (1.0 - cfg.gamma) * quantize_expert_score(a.expert);
}

EdgeScoreMatrix init_compatibility_matrix(std::span<const AgentProfile> profiles,
                                          const CompatibilityScorer &scorer,
                                          const ScoringConfig &cfg) {
  cfg.validate();
  const std::size_t n = profiles.size();
  if (n < 3) {
    throw std::invalid_argument(fmt::format("compatibility: need at least 3 profiles, got {}", n));
  }
  const std::size_t dim = profiles.front().embedding.size();
  for (std::size_t i = 0; i < n; ++i) {
    const AgentProfile &p = profiles[i];
    if (p.id.value() != i) {
      throw std::invalid_argument(
          fmt::format("compatibility: profile {} carries id {}", i, p.id.index));
    }
    if (p.embedding.size() != dim) {
      throw std::invalid_argument(fmt::format(
          "compatibility: agent {} has dimension {}, expected {}", i, p.embedding.size(), dim));
    }
    if (!std::all_of(p.embedding.begin(), p.embedding.end(),
                     [](double v) { return std::isfinite(v); })) {
      throw std::invalid_argument(fmt::format("compatibility: agent {} has non-finite embedding", i));
    }
  }

  EdgeScoreMatrix out{SquareMatrix<double>(n), SquareMatrix<double>(n), SquareMatrix<double>(n)};
  EdgeSet all;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      try {
        out.semantic(i, j) = semantic_compatibility(profiles[i], profiles[j], scorer, cfg);
      } catch (const std::exception &e) {
        throw std::runtime_error(fmt::format("compatibility: scoring pair ({},{}) failed: {}", i, j, e.what()));
      }
      out.integrated(i, j) = cfg.alpha0 * out.semantic(i, j);
      all.push_back({AgentId{i}, AgentId{j}});
    }
  }
  // Normalized view of the initial scores; with empty history the integrated
  // matrix is a positive multiple of the semantic one.
  out.normalized = normalize_scores(out, all, cfg.epsilon).first;
  return out;
}

// ---------------------------------------------------------------------------
// History

void record_episode_outcome(HistoryLedger &ledger, std::span<const Edge> credited, bool correct) {
  ledger.total_records_ += 1;
  if (!correct) {
    return;
  }
  for (const Edge &e : credited) {
    ledger.success_(e) += 1;
  }
}

EdgeSet credited_edges(std::span<const Edge> used, std::optional<AgentId> answerer,
                       CreditPolicy policy, std::size_t n) {
  if (policy == CreditPolicy::ActiveEdge) {
    return {used.begin(), used.end()};
  }
  if (!answerer) {
    return {};
  }
  // Reverse reachability to the answering agent over the used edges.
  std::vector<std::vector<std::size_t>> preds(n);
  for (const Edge &e : used) {
    preds[e.to.value()].push_back(e.from.value());
  }
  std::vector<bool> reaches(n, false);
  std::deque<std::size_t> queue{answerer->value()};
  reaches[answerer->value()] = true;
  while (!queue.empty()) {
    const std::size_t v = queue.front();
    queue.pop_front();
    for (const std::size_t u : preds[v]) {
      if (!reaches[u]) {
        reaches[u] = true;
        queue.push_back(u);
      }
    }
  }
  EdgeSet out;
  for (const Edge &e : used) {
    if (reaches[e.to.value()]) {
      out.push_back(e);
    }
  }
  return out;
}

double historical_complementarity(const HistoryLedger &ledger, Edge edge,
                                  std::span<const Edge> active, std::size_t n, double epsilon) {
  double total = 0.0;
  for (const Edge &e : active) {
    total += static_cast<double>(ledger.successes(e));
  }
  const double nn = static_cast<double>(n);
  return static_cast<double>(ledger.successes(edge)) / (total + nn * nn * epsilon);
}

double integrated_edge_score(std::uint64_t t, const ScoringConfig &cfg, double s_compat,
                             double c_hist, double beta_correction) {
  if (cfg.horizon == 0) {
    throw std::invalid_argument("integrated score: horizon must be positive");
  }
  const double frac =
      std::min(1.0, static_cast<double>(t) / static_cast<double>(cfg.horizon));
  const double semantic_weight = (1.0 - frac) * cfg.alpha0;
  const double history_weight = (cfg.beta0 + (cfg.beta_max - cfg.beta0) * frac) * beta_correction;
  return semantic_weight * s_compat + history_weight * c_hist;
}

void refresh_integrated_scores(EdgeScoreMatrix &scores, const HistoryLedger &ledger,
                               std::span<const Edge> active, std::uint64_t t,
                               const ScoringConfig &cfg, double beta_correction) {
  const std::size_t n = scores.semantic.size();
  double total = 0.0;
  for (const Edge &e : active) {
    total += static_cast<double>(ledger.successes(e));
  }
  const double denom = total + static_cast<double>(n) * static_cast<double>(n) * cfg.epsilon;

  scores.integrated = SquareMatrix<double>(n);
  for (const Edge &e : active) {
    const double c_hist = static_cast<double>(ledger.successes(e)) / denom;
    scores.integrated(e) = integrated_edge_score(t, cfg, scores.semantic(e), c_hist, beta_correction);
  }
}

// ---------------------------------------------------------------------------
// Post-prune regularization

double score_range(const SquareMatrix<double> &integrated, std::span<const Edge> edges) {
  if (edges.size() < 2) {
    return 0.0;
  }
  double lo = integrated(edges.front());
  double hi = lo;
  for (const Edge &e : edges) {
    lo = std::min(lo, integrated(e));
    hi = std::max(hi, integrated(e));
  }
  return hi - lo;
}

std::pair<SquareMatrix<double>, NormalizationStats>
normalize_scores(const EdgeScoreMatrix &scores, std::span<const Edge> active, double epsilon) {
  if (active.size() < 2) {
    throw std::invalid_argument(
        fmt::format("normalize: need at least 2 active edges, got {}", active.size()));
  }
  const double count = static_cast<double>(active.size());
  double sum = 0.0;
  for (const Edge &e : active) {
    sum += scores.integrated(e);
  }
  const double mu = sum / count;
  double sq = 0.0;
  for (const Edge &e : active) {
    const double d = scores.integrated(e) - mu;
    sq += d * d;
  }
  const double sigma = std::sqrt(sq / count);

  SquareMatrix<double> normalized(scores.integrated.size());
  for (const Edge &e : active) {
    normalized(e) = (scores.integrated(e) - mu) / (sigma + epsilon);
  }
  NormalizationStats stats;
  stats.mu = mu;
  stats.sigma = sigma;
  stats.range_before = score_range(scores.integrated, active);
  return {std::move(normalized), stats};
}

NormalizationResult normalize_and_rescale(const EdgeScoreMatrix &scores,
                                          std::span<const Edge> active_before,
                                          std::span<const Edge> active_after, double beta_current,
                                          double epsilon) {
  auto [normalized, stats] = normalize_scores(scores, active_before, epsilon);
  stats.range_after = score_range(scores.integrated, active_after);

  NormalizationResult out;
  out.scores = scores;
  out.scores.normalized = std::move(normalized);
  out.stats = stats;
  out.beta_hat = beta_current * stats.range_before / (stats.range_after + epsilon);
  return out;
}

} // namespace safesieve
