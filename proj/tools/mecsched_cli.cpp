// mecsched: simulate, sweep, frontier and analyze subcommands.
//
// Exit codes: 0 success, 1 configuration error, 2 runtime or metric error.

#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mecsched/mecsched.hpp"

namespace {

struct CommonOptions {
  std::string config_path;
  std::string out_path;
  std::string seeds;
  std::optional<double> warmup_frac;
  std::vector<std::string> overrides;
  std::optional<double> target_delay;
  std::optional<double> delay_tol;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.config_path, "key = value configuration file (defaults apply when omitted)");
  cmd->add_option("--out", o.out_path, "CSV output path (stdout when omitted)");
  cmd->add_option("--seeds", o.seeds, "comma-separated seed list, e.g. 1,2,3");
  cmd->add_option("--warmup-frac", o.warmup_frac, "fraction of leading slots excluded from metrics");
  cmd->add_option("--set", o.overrides, "override one config key, key=value (repeatable)");
}

mecsched::ExperimentConfig resolve_config(const CommonOptions& o) {
  mecsched::ExperimentConfig cfg = o.config_path.empty() ? mecsched::ExperimentConfig{} : mecsched::load_config(o.config_path);
  for (const auto& kv : o.overrides) mecsched::apply_override(cfg, kv);
  if (!o.seeds.empty()) mecsched::apply_setting(cfg, "seeds", o.seeds);
  if (o.warmup_frac) cfg.warmup_frac = *o.warmup_frac;
  if (o.target_delay) cfg.target_delay_s = *o.target_delay;
  if (o.delay_tol) cfg.delay_tolerance_s = *o.delay_tol;
  if (!o.out_path.empty()) cfg.out_path = o.out_path;
  mecsched::validate(cfg);
  return cfg;
}

// Writes to cfg.out_path, or stdout.
template <class Writer>
void emit(const mecsched::ExperimentConfig& cfg, Writer&& write) {
  if (cfg.out_path.empty()) {
    write(std::cout);
    return;
  }
  std::ofstream out(cfg.out_path);
  if (!out) throw std::runtime_error("cannot open output file '" + cfg.out_path + "'");
  write(out);
  if (!out) throw std::runtime_error("failed writing '" + cfg.out_path + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Slotted MEC task-scheduling simulator (drift-plus-penalty vs. baselines)"};
  app.require_subcommand(1);

  CommonOptions opts;
  auto* simulate = app.add_subcommand("simulate", "run the configured policy once per seed");
  auto* sweep = app.add_subcommand("sweep", "run a one-dimensional parameter sweep");
  auto* frontier = app.add_subcommand("frontier", "find the rate R meeting a delay target per (f_l, M)");
  auto* analyze = app.add_subcommand("analyze", "closed-form expectations, slot means, regime and gap bound");
  for (auto* cmd : {simulate, sweep, frontier, analyze}) add_common(cmd, opts);
  frontier->add_option("--target-delay", opts.target_delay, "target mean delay in seconds");
  frontier->add_option("--delay-tol", opts.delay_tol, "accepted deviation from the target, seconds");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    const auto cfg = resolve_config(opts);
    if (simulate->parsed()) {
      const auto rows = mecsched::cmd_simulate(cfg);
      emit(cfg, [&](std::ostream& os) { mecsched::write_simulation_csv(os, rows); });
    } else if (sweep->parsed()) {
      const auto result = mecsched::cmd_sweep(cfg);
      emit(cfg, [&](std::ostream& os) { mecsched::write_sweep_csv(os, result); });
    } else if (frontier->parsed()) {
      const auto pts = mecsched::cmd_frontier(cfg, cfg.target_delay_s, cfg.delay_tolerance_s);
      emit(cfg, [&](std::ostream& os) { mecsched::write_frontier_csv(os, pts, cfg.target_delay_s); });
    } else if (analyze->parsed()) {
      const auto rows = mecsched::cmd_analyze(cfg);
      mecsched::write_analysis_text(cfg.out_path.empty() ? std::cerr : std::cout, rows);
      emit(cfg, [&](std::ostream& os) { mecsched::write_analysis_csv(os, rows); });
    }
  } catch (const mecsched::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
