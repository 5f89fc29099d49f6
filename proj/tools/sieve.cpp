// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The SafeSieve Authors

// sieve: command-line driver for simulation, comparison and self-checks.

#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "safesieve/commands.hpp"

namespace {

using namespace safesieve;

void configure_logging() {
  spdlog::set_level(spdlog::level::warn);
  if (const char *env = std::getenv("SIEVE_LOG_LEVEL")) {
    const std::string level = env;
    if (level == "error") spdlog::set_level(spdlog::level::err);
    else if (level == "warn") spdlog::set_level(spdlog::level::warn);
    else if (level == "info") spdlog::set_level(spdlog::level::info);
    else if (level == "debug") spdlog::set_level(spdlog::level::debug);
  }
}

std::vector<PruneStrategy> parse_strategies(const std::string &list) {
  std::vector<PruneStrategy> out;
  std::stringstream in(list);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(PruneStrategy::parse(item));
  }
  return out;
}

struct RunArgs {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> output;
  std::optional<std::string> strategy;
};

void add_run_options(CLI::App *cmd, RunArgs &args) {
  cmd->add_option("--config", args.config, "YAML or JSON run configuration");
  cmd->add_option("--seed", args.seed, "root seed (overrides the config)");
  cmd->add_option("--output", args.output, "output directory (overrides the config)");
  cmd->add_option("--strategy", args.strategy, "safesieve, topk, random or noprune; comma list for compare");
}

RunConfig resolve(const RunArgs &args) {
  RunConfig cfg = args.config.empty() ? RunConfig{} : load_config(args.config);
  if (args.seed) cfg.seed = *args.seed;
  if (args.output) cfg.output_dir = *args.output;
  return cfg;
}

} // namespace

int main(int argc, char **argv) {
  configure_logging();
  CLI::App app{"SafeSieve communication-graph pruning"};
  app.require_subcommand(1);

  RunArgs sim_args, cmp_args, demo_args;
  auto *simulate = app.add_subcommand("simulate", "run one strategy and write metrics");
  add_run_options(simulate, sim_args);
  auto *compare = app.add_subcommand("compare", "run several strategies on common seeds");
  add_run_options(compare, cmp_args);
  auto *demo = app.add_subcommand("prune-demo", "trace score matrices at each prune event");
  add_run_options(demo, demo_args);

  OracleCheckOptions oracle_opts;
  std::optional<std::string> oracle_out;
  auto *oracle = app.add_subcommand("oracle-check", "compare the clustering heuristic with exact search");
  oracle->add_option("--n-max", oracle_opts.n_max, "largest instance size (4..10)");
  oracle->add_option("--seeds", oracle_opts.seeds, "instances per size");
  oracle->add_option("--seed", oracle_opts.root_seed, "root seed");
  oracle->add_option("--output", oracle_out, "directory for the report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitViolation;
  }

  try {
    if (*simulate) {
      RunConfig cfg = resolve(sim_args);
      if (sim_args.strategy) {
        const auto list = parse_strategies(*sim_args.strategy);
        if (list.size() != 1) {
          std::cerr << "error: simulate takes exactly one strategy\n";
          return kExitViolation;
        }
        cfg.strategy = list.front();
      }
      return cmd_simulate(cfg, std::cerr);
    }
    if (*compare) {
      const RunConfig cfg = resolve(cmp_args);
      const auto list = parse_strategies(cmp_args.strategy.value_or("safesieve,topk,random"));
      return cmd_compare(cfg, list, std::cerr);
    }
    if (*demo) {
      return cmd_prune_demo(resolve(demo_args), std::cerr);
    }
    if (*oracle) {
      if (oracle_out) oracle_opts.output_dir = *oracle_out;
      return cmd_oracle_check(oracle_opts, std::cout);
    }
  } catch (const std::invalid_argument &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitViolation;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitOk;
}
