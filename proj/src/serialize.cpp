// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The SafeSieve Authors

#include "safesieve/serialize.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

namespace safesieve {

namespace {

Json read_json_file(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error(fmt::format("cannot open {}", path.string()));
  }
  try {
    return Json::parse(in);
  } catch (const Json::parse_error &e) {
    throw std::runtime_error(fmt::format("{}: {}", path.string(), e.what()));
  }
}

PruneStrategy::Kind kind_from_name(const std::string &name) {
  return PruneStrategy::parse(name).kind;
}

} // namespace

Json graph_to_json(const CommunicationGraph &g) {
  Json j;
  j["n"] = g.size();
  Json nodes = Json::array();
  for (const AgentId v : g.active_nodes()) nodes.push_back(v.index);
  j["active_nodes"] = std::move(nodes);
  Json mask = Json::array();
  for (std::size_t i = 0; i < g.size(); ++i) {
    Json row = Json::array();
    for (std::size_t k = 0; k < g.size(); ++k) row.push_back(g.mask(i, k));
    mask.push_back(std::move(row));
  }
  j["mask"] = std::move(mask);
  return j;
}

CommunicationGraph graph_from_json(const Json &j) {
  const auto n = j.at("n").get<std::size_t>();
  std::vector<bool> active(n, false);
  for (const auto &v : j.at("active_nodes")) {
    const auto idx = v.get<std::size_t>();
    if (idx >= n) throw std::invalid_argument(fmt::format("graph json: node {} out of range", idx));
    active[idx] = true;
  }
  const Json &rows = j.at("mask");
  if (rows.size() != n) throw std::invalid_argument("graph json: mask must have n rows");
  std::vector<std::uint8_t> mask;
  mask.reserve(n * n);
  for (const auto &row : rows) {
    if (row.size() != n) throw std::invalid_argument("graph json: mask rows must have n entries");
    for (const auto &x : row) mask.push_back(x.get<std::uint8_t>());
  }
  return CommunicationGraph(n, std::move(mask), std::move(active));
}

Json assignment_to_json(const ClusterAssignment &a) {
  Json j;
  Json terms = Json::array();
  for (const AgentId t : a.terminals) terms.push_back(t.index);
  j["terminals"] = std::move(terms);
  Json f = Json::object();
  for (std::size_t v = 0; v < a.f.size(); ++v) {
    if (a.f[v]) f[std::to_string(v)] = a.f[v]->index;
  }
  j["f"] = std::move(f);
  j["cost"] = a.cost;
  return j;
}

ClusterAssignment assignment_from_json(const Json &j, std::size_t n) {
  ClusterAssignment a;
  for (const auto &t : j.at("terminals")) a.terminals.emplace_back(t.get<std::size_t>());
  a.f.assign(n, std::nullopt);
  for (const auto &[key, value] : j.at("f").items()) {
    const std::size_t v = std::stoul(key);
    if (v >= n) throw std::invalid_argument(fmt::format("assignment json: agent {} out of range", v));
    a.f[v] = AgentId{value.get<std::size_t>()};
  }
  a.cost = j.at("cost").get<double>();
  return a;
}

Json edges_to_json(const EdgeSet &edges) {
  Json out = Json::array();
  for (const Edge &e : edges) out.push_back({e.from.index, e.to.index});
  return out;
}

EdgeSet edges_from_json(const Json &j) {
  EdgeSet out;
  for (const auto &pair : j) {
    out.push_back({AgentId{pair.at(0).get<std::size_t>()}, AgentId{pair.at(1).get<std::size_t>()}});
  }
  return out;
}

Json event_to_json(const PruneEvent &e) {
  Json j;
  j["t"] = e.t;
  j["strategy"] = PruneStrategy{e.strategy, std::nullopt}.name();
  j["rule_set"] = edges_to_json(e.rule_set);
  j["budget_set"] = edges_to_json(e.budget_set);
  Json removed = Json::array();
  for (const AgentId v : e.removed_nodes) removed.push_back(v.index);
  j["removed_nodes"] = std::move(removed);
  j["theta"] = e.theta;
  j["stats"] = {{"mu", e.stats.mu},
                {"sigma", e.stats.sigma},
                {"range_before", e.stats.range_before},
                {"range_after", e.stats.range_after}};
  j["assignment"] = e.assignment ? assignment_to_json(*e.assignment) : Json(nullptr);
  j["normalized_mean"] = e.normalized_mean;
  j["beta_hat"] = e.beta_hat;
  j["beta_correction"] = e.beta_correction;
  j["floored_scores"] = e.floored_scores;
  j["active_before"] = e.active_before;
  j["active_after"] = e.active_after;
  j["pruned_total"] = e.pruned_total;
  return j;
}

PruneEvent event_from_json(const Json &j, std::size_t n) {
  PruneEvent e;
  e.t = j.at("t").get<std::uint64_t>();
  e.strategy = kind_from_name(j.at("strategy").get<std::string>());
  e.rule_set = edges_from_json(j.at("rule_set"));
  e.budget_set = edges_from_json(j.at("budget_set"));
  for (const auto &v : j.at("removed_nodes")) e.removed_nodes.emplace_back(v.get<std::size_t>());
  e.theta = j.at("theta").get<double>();
  const Json &s = j.at("stats");
  e.stats = {s.at("mu").get<double>(), s.at("sigma").get<double>(),
             s.at("range_before").get<double>(), s.at("range_after").get<double>()};
  if (!j.at("assignment").is_null()) e.assignment = assignment_from_json(j.at("assignment"), n);
  e.normalized_mean = j.at("normalized_mean").get<double>();
  e.beta_hat = j.at("beta_hat").get<double>();
  e.beta_correction = j.at("beta_correction").get<double>();
  e.floored_scores = j.at("floored_scores").get<std::size_t>();
  e.active_before = j.at("active_before").get<std::size_t>();
  e.active_after = j.at("active_after").get<std::size_t>();
  e.pruned_total = j.at("pruned_total").get<std::size_t>();
  return e;
}

Json matrix_to_json(const SquareMatrix<double> &m) {
  Json out = Json::array();
  for (std::size_t i = 0; i < m.size(); ++i) {
    const auto row = m.row(i);
    out.push_back(Json(std::vector<double>(row.begin(), row.end())));
  }
  return out;
}

void write_event_log(std::ostream &out, const std::vector<PruneEvent> &events) {
  for (const PruneEvent &e : events) out << event_to_json(e).dump() << '\n';
}

std::vector<PruneEvent> read_event_log(std::istream &in, std::size_t n) {
  std::vector<PruneEvent> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    out.push_back(event_from_json(Json::parse(line), n));
  }
  return out;
}

void write_metrics_csv(std::ostream &out, const TrialMetrics &m) {
  out << "batch,accuracy,tokens,cost,active_edges\n";
  for (const BatchMetrics &b : m.batches) {
    out << fmt::format("{},{},{},{},{}\n", b.batch, b.accuracy, b.tokens, b.cost_cents,
                       b.active_edges);
  }
}

std::vector<BatchMetrics> read_metrics_csv(std::istream &in) {
  std::string line;
  if (!std::getline(in, line) || line != "batch,accuracy,tokens,cost,active_edges") {
    throw std::runtime_error("metrics csv: unexpected header");
  }
  std::vector<BatchMetrics> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(row, field, ',')) fields.push_back(field);
    if (fields.size() != 5) {
      throw std::runtime_error(fmt::format("metrics csv: expected 5 fields in '{}'", line));
    }
    BatchMetrics b;
    b.batch = std::stoull(fields[0]);
    b.accuracy = std::stod(fields[1]);
    b.tokens = std::stoull(fields[2]);
    b.cost_cents = std::stod(fields[3]);
    b.active_edges = std::stoull(fields[4]);
    out.push_back(b);
  }
  return out;
}

std::vector<AgentProfile> embeddings_from_json(const Json &j) {
  std::vector<AgentProfile> out;
  for (const auto &a : j.at("agents")) {
    AgentProfile p;
    p.id = AgentId{a.at("id").get<std::size_t>()};
    p.role = a.at("role").get<std::string>();
    p.embedding = a.at("embedding").get<std::vector<double>>();
    out.push_back(std::move(p));
  }
  std::sort(out.begin(), out.end(), [](const auto &a, const auto &b) { return a.id < b.id; });
  return out;
}

std::vector<AgentProfile> load_embeddings(const std::filesystem::path &path) {
  return embeddings_from_json(read_json_file(path));
}

Json embeddings_to_json(const std::vector<AgentProfile> &profiles) {
  Json agents = Json::array();
  for (const AgentProfile &p : profiles) {
    agents.push_back({{"id", p.id.index}, {"role", p.role}, {"embedding", p.embedding}});
  }
  return Json{{"agents", std::move(agents)}};
}

std::map<std::pair<std::uint32_t, std::uint32_t>, double> expert_scores_from_json(const Json &j) {
  std::map<std::pair<std::uint32_t, std::uint32_t>, double> out;
  for (const auto &[key, value] : j.items()) {
    const auto comma = key.find(',');
    if (comma == std::string::npos) {
      throw std::invalid_argument(fmt::format("expert scores: key '{}' is not 'i,j'", key));
    }
    const auto i = static_cast<std::uint32_t>(std::stoul(key.substr(0, comma)));
    const auto k = static_cast<std::uint32_t>(std::stoul(key.substr(comma + 1)));
    out[{i, k}] = value.get<double>();
  }
  return out;
}

std::map<std::pair<std::uint32_t, std::uint32_t>, double>
load_expert_scores(const std::filesystem::path &path) {
  return expert_scores_from_json(read_json_file(path));
}

Json trial_summary_to_json(const TrialResult &trial) {
  const TrialMetrics &m = trial.metrics;
  Json j;
  j["strategy"] = trial.strategy.name();
  j["episodes"] = m.episodes;
  j["mean_accuracy"] = m.mean_accuracy();
  j["token_total"] = m.token_total;
  j["cost_total_cents"] = m.cost_total_cents;
  j["per_agent_tokens"] = m.per_agent_tokens;
  j["per_agent_cost"] = m.per_agent_cost;
  j["prune_events"] = trial.final_state.events.size();
  j["pruned_total"] = trial.final_state.pruned_total;
  j["pruned_rate"] = trial.final_state.pruned_rate();
  j["final_graph"] = graph_to_json(trial.final_state.graph);
  return j;
}

Json comparison_to_json(const ComparisonReport &report) {
  auto strategy_json = [](const StrategyReport &s) {
    Json j;
    j["strategy"] = s.strategy.name();
    j["mean_accuracy"] = s.mean_accuracy;
    j["accuracy_delta"] = s.accuracy_delta;
    j["accuracy_delta_vs_first"] = s.accuracy_delta_vs_first;
    j["token_total"] = s.token_total;
    j["token_reduction_pct"] = s.token_reduction_pct;
    j["cost_total_cents"] = s.cost_total_cents;
    j["cost_per_agent"] = s.cost_per_agent;
    j["attacked_accuracy"] = s.attacked_accuracy ? Json(*s.attacked_accuracy) : Json(nullptr);
    j["accuracy_drop"] = s.accuracy_drop ? Json(*s.accuracy_drop) : Json(nullptr);
    return j;
  };
  Json j;
  j["replicates"] = report.replicates;
  j["reference"] = strategy_json(report.reference);
  Json list = Json::array();
  for (const StrategyReport &s : report.strategies) list.push_back(strategy_json(s));
  j["strategies"] = std::move(list);
  return j;
}

} // namespace safesieve
