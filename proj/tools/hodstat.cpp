#include <iostream>

#include <CLI11.hpp>

#include "hodstat/cli.hpp"

namespace {

void add_common(CLI::App* sub, hodstat::cli::Command& cmd, std::string& config) {
  sub->add_option("--config", config, "scenario JSON (default: built-in scenario)");
  sub->add_option("--set", cmd.overrides, "override a config key, e.g. --set strategy.parameter=0.3")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
}

void add_seeds(CLI::App* sub, std::vector<std::uint64_t>& seeds) {
  auto* one = sub->add_option("--seed", seeds, "single seed");
  auto* many = sub->add_option("--seeds", seeds, "comma-separated seeds")->delimiter(',');
  one->excludes(many);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hodstat - WLAN handover decision stability simulator"};
  app.require_subcommand(1);

  hodstat::cli::Command cmd;
  std::string config, out = ".";
  std::vector<std::uint64_t> seeds_b;

  auto* run = app.add_subcommand("run", "simulate and write event log and metrics CSVs");
  auto* swp = app.add_subcommand("sweep", "sweep a strategy parameter over seeds");
  auto* cmp = app.add_subcommand("compare", "sweep two strategies on the same seeds");
  auto* val = app.add_subcommand("validate", "check a scenario without running it");
  auto* def = app.add_subcommand("defaults", "print the resolved scenario as JSON");

  for (auto* sub : {run, swp, cmp, val, def}) add_common(sub, cmd, config);
  for (auto* sub : {run, swp, cmp}) {
    sub->add_option("--out", out, "output directory")->capture_default_str();
    add_seeds(sub, cmd.seeds);
  }
  for (auto* sub : {swp, cmp}) {
    sub->add_option("--strategy", cmd.strategies, "none|hysteresis|waiting|randomized");
    sub->add_option("--values", cmd.value_specs, "parameter grid start:stop:step");
    sub->add_option("--retention", cmd.retention, "Score_rate fraction of the no-strategy baseline to keep")
        ->capture_default_str();
    sub->add_option("--threads", cmd.threads, "worker threads (0 = all cores)");
  }
  auto* sb = cmp->add_option("--seeds-b", seeds_b, "seeds of the second sweep (must equal --seeds)")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : hodstat::cli::kConfigError;
  }

  cmd.verb = app.get_subcommands().front()->get_name();
  if (!config.empty()) cmd.config_path = config;
  cmd.out_dir = out;
  if (sb->count() > 0) cmd.seeds_b = seeds_b;
  return hodstat::cli::dispatch(cmd, std::cout, std::cerr);
}
