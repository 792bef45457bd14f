#include "qbc4/cli/commands.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

using qbc4::cli::RunConfig;

void add_common(CLI::App* sub, RunConfig& c) {
  sub->add_option("--seed", c.seed, "Master seed (required)");
  sub->add_option("--out", c.output, "Write the report to this file");
  sub->add_option("--format", c.format, "Report format: json or csv");
}

void add_optimizer(CLI::App* sub, RunConfig& c) {
  sub->add_option("--restarts", c.restarts, "Seesaw restarts");
  sub->add_option("--max-iter", c.max_iterations, "Seesaw iteration cap per restart");
  sub->add_option("--tol", c.tol, "Seesaw convergence tolerance");
  sub->add_option("--oracle-starts", c.oracle_starts, "Gradient-oracle starts");
  sub->add_option("--oracle-iter", c.oracle_iterations, "Gradient-oracle iterations per start");
  sub->add_flag("!--no-oracle", c.oracle, "Skip the independent gradient oracle");
  sub->add_option("--n-rounds", c.rounds, "Report p_A^N for this N");
  sub->add_flag("--relaxed", c.relaxed, "Add the relaxed-opening tradeoff curve");
  sub->add_flag("--joint", c.joint, "Optimize jointly over two instances");
  sub->add_flag("--history", c.history, "Include the best restart's objective history");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qbc4: simulation and analysis of the four-dimensional quantum bit commitment"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto* run = app.add_subcommand("run", "Run the honest protocol on N instances");
  add_common(run, cfg);
  run->add_option("--n", cfg.instances, "Number of instances");
  run->add_option("--bit", cfg.bit, "Committed bit (0 or 1)");
  run->add_option("--ensemble", cfg.ensembles, "Preset name or ensemble JSON file")->expected(1);
  run->add_option("--mode", cfg.mode, "entangled or classical");

  auto* conceal = app.add_subcommand("conceal", "Check that Babe's view is independent of the bit");
  add_common(conceal, cfg);
  conceal->add_option("--ensemble", cfg.ensembles, "Extra ensembles (defaults to the structured set)");
  conceal->add_flag("--purify", cfg.purify, "Include the purified input comparisons");
  conceal->add_flag("--corrupt", cfg.corrupt, "Skip the controlled Paulis (negative control)");
  conceal->add_option("--random-pairs", cfg.random_pairs, "Haar basis pairs to test");
  conceal->add_option("--random-ensembles", cfg.random_ensembles, "Random weighted ensembles to test");

  auto* bind = app.add_subcommand("bind", "Optimize Adam's local-rotation cheat");
  add_common(bind, cfg);
  bind->add_option("--ensemble", cfg.ensembles, "One or more presets or ensemble files");
  add_optimizer(bind, cfg);

  auto* attack = app.add_subcommand("babe-attack", "Simulate Babe's input attack and Adam's cut-and-choose");
  add_common(attack, cfg);
  attack->add_option("--n", cfg.instances, "Number of instances (default 10)");
  attack->add_option("--attack-file", cfg.attack_file, "Attack description JSON");
  attack->add_flag("--honest", cfg.honest, "Use honest inputs instead of an attack");
  attack->add_option("--fraction", cfg.fraction, "Fraction of instances Adam checks");
  attack->add_option("--attacked", cfg.attacked, "Number of attacked instances (default N)");
  attack->add_option("--trials", cfg.trials, "Monte-Carlo trials for the abort rate");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : qbc4::cli::kUsage;
  }
  cfg.command = app.get_subcommands().front()->get_name();
  if (cfg.command == "babe-attack" && attack->count("--n") == 0) cfg.instances = 10;

  try {
    const auto result = qbc4::cli::dispatch(cfg);
    const std::string body = qbc4::cli::payload(cfg, result);
    if (cfg.output.empty()) {
      std::cout << body;
    } else {
      qbc4::cli::write_atomically(cfg.output, body);
      std::cout << result.summary;
    }
    return result.exit_code;
  } catch (const qbc4::cli::UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return qbc4::cli::kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return qbc4::cli::kUsage + 1;
  }
}
