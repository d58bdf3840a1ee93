// Command-line front end: baseline curves, ensemble simulation, histograms
// and parameter sweeps for the charge-qubit purification protocols.

#include "purify/commands.hpp"
#include "purify/config.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

namespace {

struct FlagSet {
  std::string config_path;
  std::vector<std::string> sets;
  // Flag name -> config key; filled values become overrides in declaration order.
  std::vector<std::pair<std::string, std::string>> bound;
  std::vector<std::unique_ptr<std::string>> storage;
  std::vector<CLI::Option*> options;
};

void add_common(CLI::App& cmd, FlagSet& flags) {
  cmd.add_option("--config", flags.config_path, "key=value configuration file");
  const std::pair<const char*, const char*> table[] = {
      {"--protocol", "protocol"},   {"--runs", "runs"},         {"--seed", "seed"},
      {"--dt-fs", "dt_fs"},         {"--tmax-ns", "tmax_ns"},   {"--zlimit", "zlimit"},
      {"--ng-lock", "ng_lock"},     {"--delay-deg", "delay_deg"}, {"--target-eps", "target_eps"},
      {"--snapshot-ns", "snapshot_ns"}, {"--bins", "bins"},     {"--out", "out"},
      {"--threads", "threads"},
  };
  for (const auto& [flag, key] : table) {
    flags.storage.push_back(std::make_unique<std::string>());
    flags.options.push_back(cmd.add_option(flag, *flags.storage.back(), std::string("sets ") + key));
    flags.bound.emplace_back(flag, key);
  }
  cmd.add_flag("--json", "also write a JSON mirror of every output");
  cmd.add_option("--set", flags.sets, "extra key=value override (repeatable)");
}

purify::KeyValues overrides(const CLI::App& cmd, const FlagSet& flags) {
  purify::KeyValues kv;
  for (std::size_t i = 0; i < flags.bound.size(); ++i) {
    if (flags.options[i]->count() > 0) kv.emplace_back(flags.bound[i].second, *flags.storage[i]);
  }
  if (cmd.count("--json") > 0) kv.emplace_back("json", "true");
  for (const std::string& s : flags.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw purify::ConfigError({"--set " + s + ": expected key=value"});
    kv.emplace_back(s.substr(0, eq), s.substr(eq + 1));
  }
  return kv;
}

std::string read_config(const std::string& path) {
  if (path.empty()) return {};
  std::ifstream f(path, std::ios::binary);
  if (!f) throw purify::ConfigError({"config: cannot read '" + path + "'"});
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte Carlo simulator for rapid-purification feedback on a Cooper pair box"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(purify::kVersion));

  FlagSet baseline_flags, simulate_flags, hist_flags, sweep_flags;
  CLI::App* baseline = app.add_subcommand("baseline", "analytic reference curves and inversions");
  CLI::App* simulate = app.add_subcommand("simulate", "ensemble transient and per-run results");
  CLI::App* hist = app.add_subcommand("hist", "first-passage or impurity-at-time histogram");
  CLI::App* sweep = app.add_subcommand("sweep", "speed-up versus zlimit or phase delay");
  add_common(*baseline, baseline_flags);
  add_common(*simulate, simulate_flags);
  add_common(*hist, hist_flags);
  add_common(*sweep, sweep_flags);

  std::string kind = "first-passage";
  hist->add_option("--kind", kind, "first-passage | impurity-at")
      ->check(CLI::IsMember({"first-passage", "impurity-at"}));
  std::string axis;
  std::string values;
  std::string levels;
  sweep->add_option("--axis", axis, "zlimit | delay")->required()->check(CLI::IsMember({"zlimit", "delay"}));
  sweep->add_option("--values", values, "comma-separated parameter values")->required();
  sweep->add_option("--levels", levels, "comma-separated impurity levels");

  CLI11_PARSE(app, argc, argv);

  try {
    auto run = [&](CLI::App& cmd, FlagSet& flags) {
      purify::KeyValues kv = overrides(cmd, flags);
      if (!levels.empty()) kv.emplace_back("levels", levels);
      return purify::parse_config(read_config(flags.config_path), kv);
    };
    std::vector<std::filesystem::path> written;
    if (baseline->parsed()) {
      written = purify::cmd_baseline(run(*baseline, baseline_flags));
    } else if (simulate->parsed()) {
      written = purify::cmd_simulate(run(*simulate, simulate_flags));
    } else if (hist->parsed()) {
      const auto k = kind == "impurity-at" ? purify::HistKind::impurity_at
                                           : purify::HistKind::first_passage;
      written = purify::cmd_hist(run(*hist, hist_flags), k);
    } else if (sweep->parsed()) {
      const purify::RunConfig cfg = run(*sweep, sweep_flags);
      written = purify::cmd_sweep(cfg, axis, purify::parse_number_list(values, "values"));
    }
    for (const auto& p : written) std::cout << p.string() << "\n";
  } catch (const purify::ConfigError& e) {
    for (const auto& p : e.problems()) std::cerr << "purify: " << p << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "purify: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
