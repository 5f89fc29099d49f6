// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The SafeSieve Authors

#include "safesieve/config.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>
#include <yaml-cpp/yaml.h>

namespace safesieve {

namespace {

using FlatMap = std::map<std::string, std::string>;

void flatten_yaml(const YAML::Node &node, const std::string &prefix, FlatMap &out) {
  if (node.IsNull()) return;
  if (!node.IsMap()) {
    throw ConfigError(prefix.empty() ? "config: top level must be a mapping"
                                     : fmt::format("config: '{}' must be a scalar or mapping", prefix));
  }
  for (const auto &kv : node) {
    const std::string key = kv.first.as<std::string>();
    const std::string full = prefix.empty() ? key : prefix + "." + key;
    const YAML::Node &value = kv.second;
    if (value.IsMap()) {
      flatten_yaml(value, full, out);
    } else if (value.IsScalar()) {
      out[full] = value.Scalar();
    } else if (!value.IsNull()) {
      throw ConfigError(fmt::format("config: '{}' must be a scalar or mapping", full));
    }
  }
}

void flatten_json(const nlohmann::json &node, const std::string &prefix, FlatMap &out) {
  if (!node.is_object()) {
    throw ConfigError("config: JSON document must be an object");
  }
  for (const auto &[key, value] : node.items()) {
    const std::string full = prefix.empty() ? key : prefix + "." + key;
    if (value.is_object()) {
      flatten_json(value, full, out);
    } else if (value.is_string()) {
      out[full] = value.get<std::string>();
    } else if (value.is_number() || value.is_boolean()) {
      out[full] = value.dump();
    } else if (!value.is_null()) {
      throw ConfigError(fmt::format("config: '{}' must be a scalar or object", full));
    }
  }
}

double as_double(const std::string &key, const std::string &text) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used == text.size()) return v;
  } catch (const std::exception &) {
  }
  throw ConfigError(fmt::format("config: '{}' expects a number, got '{}'", key, text));
}

std::uint64_t as_uint(const std::string &key, const std::string &text) {
  std::uint64_t v = 0;
  const auto *end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc{} || ptr != end) {
    throw ConfigError(fmt::format("config: '{}' expects a non-negative integer, got '{}'", key, text));
  }
  return v;
}

template <class Enum>
Enum as_enum(const std::string &key, const std::string &text,
             std::initializer_list<std::pair<const char *, Enum>> options) {
  std::string names;
  for (const auto &[name, value] : options) {
    if (text == name) return value;
    names += names.empty() ? name : fmt::format(", {}", name);
  }
  throw ConfigError(fmt::format("config: '{}' must be one of {{{}}}, got '{}'", key, names, text));
}

const char *credit_name(CreditPolicy p) {
  return p == CreditPolicy::ActiveEdge ? "active-edge" : "path-restricted";
}
const char *schedule_name(ThresholdSchedule s) {
  return s == ThresholdSchedule::Literal ? "literal" : "smooth";
}
const char *isolation_name(IsolationRule r) {
  return r == IsolationRule::Bidirectional ? "bidirectional" : "out-degree";
}
const char *scenario_name(ScenarioKind k) { return k == ScenarioKind::Benign ? "benign" : "planted"; }

using Setter = std::function<void(RunConfig &, const std::string &key, const std::string &text)>;

const std::vector<std::pair<std::string, Setter>> &setters() {
  static const std::vector<std::pair<std::string, Setter>> table{
      {"seed", [](RunConfig &c, auto &k, auto &v) { c.seed = as_uint(k, v); }},
      {"output_dir", [](RunConfig &c, auto &, auto &v) { c.output_dir = v; }},
      {"agents_file", [](RunConfig &c, auto &, auto &v) { c.agents_file = v; }},
      {"expert_scores_file", [](RunConfig &c, auto &, auto &v) { c.expert_scores_file = v; }},
      {"episodes", [](RunConfig &c, auto &k, auto &v) { c.episodes = as_uint(k, v); }},
      {"batch_size", [](RunConfig &c, auto &k, auto &v) { c.batch_size = as_uint(k, v); }},
      {"replicates", [](RunConfig &c, auto &k, auto &v) { c.replicates = as_uint(k, v); }},
      {"strategy.name",
       [](RunConfig &c, auto &k, auto &v) {
         try {
           c.strategy.kind = PruneStrategy::parse(v).kind;
         } catch (const std::invalid_argument &e) {
           throw ConfigError(fmt::format("config: '{}': {}", k, e.what()));
         }
       }},
      {"strategy.fraction", [](RunConfig &c, auto &k, auto &v) { c.strategy.fraction = as_double(k, v); }},
      {"scoring.gamma", [](RunConfig &c, auto &k, auto &v) { c.scoring.gamma = as_double(k, v); }},
      {"scoring.alpha0", [](RunConfig &c, auto &k, auto &v) { c.scoring.alpha0 = as_double(k, v); }},
      {"scoring.beta0", [](RunConfig &c, auto &k, auto &v) { c.scoring.beta0 = as_double(k, v); }},
      {"scoring.beta_max", [](RunConfig &c, auto &k, auto &v) { c.scoring.beta_max = as_double(k, v); }},
      {"scoring.horizon", [](RunConfig &c, auto &k, auto &v) { c.scoring.horizon = as_uint(k, v); }},
      {"scoring.epsilon", [](RunConfig &c, auto &k, auto &v) { c.scoring.epsilon = as_double(k, v); }},
      {"scoring.credit_policy",
       [](RunConfig &c, auto &k, auto &v) {
         c.scoring.credit_policy = as_enum<CreditPolicy>(
             k, v, {{"active-edge", CreditPolicy::ActiveEdge}, {"path-restricted", CreditPolicy::PathRestricted}});
       }},
      {"prune.theta0", [](RunConfig &c, auto &k, auto &v) { c.prune.theta0 = as_double(k, v); }},
      {"prune.theta_max", [](RunConfig &c, auto &k, auto &v) { c.prune.theta_max = as_double(k, v); }},
      {"prune.k_rate", [](RunConfig &c, auto &k, auto &v) { c.prune.k_rate = as_double(k, v); }},
      {"prune.r", [](RunConfig &c, auto &k, auto &v) { c.prune.r = as_double(k, v); }},
      {"prune.r_max", [](RunConfig &c, auto &k, auto &v) { c.prune.r_max = as_double(k, v); }},
      {"prune.b_start", [](RunConfig &c, auto &k, auto &v) { c.prune.b_start = as_uint(k, v); }},
      {"prune.prune_interval", [](RunConfig &c, auto &k, auto &v) { c.prune.prune_interval = as_uint(k, v); }},
      {"prune.schedule",
       [](RunConfig &c, auto &k, auto &v) {
         c.prune.schedule = as_enum<ThresholdSchedule>(
             k, v, {{"literal", ThresholdSchedule::Literal}, {"smooth", ThresholdSchedule::Smooth}});
       }},
      {"prune.isolation",
       [](RunConfig &c, auto &k, auto &v) {
         c.prune.isolation = as_enum<IsolationRule>(
             k, v, {{"bidirectional", IsolationRule::Bidirectional}, {"out-degree", IsolationRule::OutDegree}});
       }},
      {"world.base_acc", [](RunConfig &c, auto &k, auto &v) { c.world.base_acc = as_double(k, v); }},
      {"world.gain", [](RunConfig &c, auto &k, auto &v) { c.world.gain = as_double(k, v); }},
      {"world.malice_penalty", [](RunConfig &c, auto &k, auto &v) { c.world.malice_penalty = as_double(k, v); }},
      {"world.rounds_per_episode",
       [](RunConfig &c, auto &k, auto &v) {
         c.world.rounds_per_episode = static_cast<std::uint32_t>(as_uint(k, v));
       }},
      {"world.clamp_low", [](RunConfig &c, auto &k, auto &v) { c.world.clamp_low = as_double(k, v); }},
      {"world.clamp_high", [](RunConfig &c, auto &k, auto &v) { c.world.clamp_high = as_double(k, v); }},
      {"scenario.kind",
       [](RunConfig &c, auto &k, auto &v) {
         c.scenario.kind = as_enum<ScenarioKind>(
             k, v, {{"benign", ScenarioKind::Benign}, {"planted", ScenarioKind::Planted}});
       }},
      {"scenario.agents", [](RunConfig &c, auto &k, auto &v) { c.scenario.agents = as_uint(k, v); }},
      {"scenario.adversaries", [](RunConfig &c, auto &k, auto &v) { c.scenario.adversaries = as_uint(k, v); }},
      {"scenario.adversary_quality",
       [](RunConfig &c, auto &k, auto &v) { c.scenario.adversary_quality = as_double(k, v); }},
      {"scenario.quality_lo", [](RunConfig &c, auto &k, auto &v) { c.scenario.quality_lo = as_double(k, v); }},
      {"scenario.quality_hi", [](RunConfig &c, auto &k, auto &v) { c.scenario.quality_hi = as_double(k, v); }},
      {"scenario.clusters", [](RunConfig &c, auto &k, auto &v) { c.scenario.clusters = as_uint(k, v); }},
      {"scenario.inter_noise", [](RunConfig &c, auto &k, auto &v) { c.scenario.inter_noise = as_double(k, v); }},
  };
  return table;
}

void require(bool ok, const char *what) {
  if (!ok) throw ConfigError(what);
}

} // namespace

const std::vector<std::string> &config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> out;
    for (const auto &[key, setter] : setters()) out.push_back(key);
    return out;
  }();
  return keys;
}

void RunConfig::validate() const {
  try {
    scoring.validate();
    prune.validate(scoring.horizon);
    world.validate();
  } catch (const ConfigError &) {
    throw;
  } catch (const std::invalid_argument &e) {
    throw ConfigError(e.what());
  }
  require(episodes > 0, "episodes must satisfy episodes > 0");
  require(batch_size > 0, "batch_size must satisfy batch_size > 0");
  require(replicates > 0, "replicates must satisfy replicates > 0");
  if (strategy.fraction) {
    require(*strategy.fraction > 0.0 && *strategy.fraction < 1.0,
            "strategy.fraction must satisfy fraction ∈ (0,1)");
  }
  require(scenario.agents >= 3, "scenario.agents must satisfy agents ≥ 3");
  require(scenario.adversaries + 2 < scenario.agents,
          "scenario.adversaries must satisfy adversaries < agents - 2");
  require(scenario.adversary_quality >= 0.0 && scenario.adversary_quality <= 1.0,
          "scenario.adversary_quality must satisfy adversary_quality ∈ [0,1]");
  require(scenario.quality_lo >= 0.0 && scenario.quality_lo <= scenario.quality_hi &&
              scenario.quality_hi <= 1.0,
          "scenario.quality_lo/quality_hi must satisfy 0 ≤ lo ≤ hi ≤ 1");
  if (scenario.kind == ScenarioKind::Planted) {
    require(scenario.clusters >= 2 && scenario.agents >= 3 * scenario.clusters,
            "scenario.clusters must satisfy clusters ≥ 2 and agents ≥ 3·clusters");
    require(scenario.inter_noise >= 0.0 && scenario.inter_noise <= 0.5,
            "scenario.inter_noise must satisfy inter_noise ∈ [0,0.5]");
  }
}

RunConfig parse_config(std::string_view text) {
  FlatMap flat;
  const auto first = std::find_if(text.begin(), text.end(), [](char c) { return !std::isspace(static_cast<unsigned char>(c)); });
  try {
    if (first != text.end() && *first == '{') {
      flatten_json(nlohmann::json::parse(text), "", flat);
    } else {
      flatten_yaml(YAML::Load(std::string(text)), "", flat);
    }
  } catch (const YAML::Exception &e) {
    throw ConfigError(fmt::format("config: parse error: {}", e.what()));
  } catch (const nlohmann::json::exception &e) {
    throw ConfigError(fmt::format("config: parse error: {}", e.what()));
  }

  RunConfig cfg;
  const auto &table = setters();
  for (const auto &[key, value] : flat) {
    const auto it = std::find_if(table.begin(), table.end(), [&](const auto &kv) { return kv.first == key; });
    if (it == table.end()) {
      throw ConfigError(fmt::format("config: unknown key '{}'", key));
    }
    it->second(cfg, key, value);
  }
  if (!flat.contains("scoring.horizon")) cfg.scoring.horizon = cfg.episodes;
  if (!flat.contains("prune.b_start")) cfg.prune.b_start = cfg.scoring.horizon / 5;
  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError(fmt::format("config: cannot open {}", path.string()));
  }
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string emit_config(const RunConfig &c) {
  std::string out;
  auto put = [&out](std::string_view key, const auto &value) {
    out += fmt::format("{}: {}\n", key, value);
  };
  // Paths are quoted so YAML never reinterprets them.
  auto put_path = [&out](std::string_view key, const std::filesystem::path &p) {
    out += fmt::format("{}: {}\n", key, YAML::Dump(YAML::Node(p.string())));
  };
  put("seed", c.seed);
  put_path("output_dir", c.output_dir);
  if (c.agents_file) put_path("agents_file", *c.agents_file);
  if (c.expert_scores_file) put_path("expert_scores_file", *c.expert_scores_file);
  put("episodes", c.episodes);
  put("batch_size", c.batch_size);
  put("replicates", c.replicates);
  put("strategy.name", c.strategy.name());
  if (c.strategy.fraction) put("strategy.fraction", *c.strategy.fraction);
  put("scoring.gamma", c.scoring.gamma);
  put("scoring.alpha0", c.scoring.alpha0);
  put("scoring.beta0", c.scoring.beta0);
  put("scoring.beta_max", c.scoring.beta_max);
  put("scoring.horizon", c.scoring.horizon);
  put("scoring.epsilon", c.scoring.epsilon);
  put("scoring.credit_policy", credit_name(c.scoring.credit_policy));
  put("prune.theta0", c.prune.theta0);
  put("prune.theta_max", c.prune.theta_max);
  put("prune.k_rate", c.prune.k_rate);
  put("prune.r", c.prune.r);
  put("prune.r_max", c.prune.r_max);
  put("prune.b_start", c.prune.b_start);
  put("prune.prune_interval", c.prune.prune_interval);
  put("prune.schedule", schedule_name(c.prune.schedule));
  put("prune.isolation", isolation_name(c.prune.isolation));
  put("world.base_acc", c.world.base_acc);
  put("world.gain", c.world.gain);
  put("world.malice_penalty", c.world.malice_penalty);
  put("world.rounds_per_episode", c.world.rounds_per_episode);
  put("world.clamp_low", c.world.clamp_low);
  put("world.clamp_high", c.world.clamp_high);
  put("scenario.kind", scenario_name(c.scenario.kind));
  put("scenario.agents", c.scenario.agents);
  put("scenario.adversaries", c.scenario.adversaries);
  put("scenario.adversary_quality", c.scenario.adversary_quality);
  put("scenario.quality_lo", c.scenario.quality_lo);
  put("scenario.quality_hi", c.scenario.quality_hi);
  put("scenario.clusters", c.scenario.clusters);
  put("scenario.inter_noise", c.scenario.inter_noise);
  return out;
}

} // namespace safesieve
