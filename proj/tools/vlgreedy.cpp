// vlgreedy: run norm, greedy, democracy and verification experiments from a
// JSON config.

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "vlgreedy/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Variable-exponent Haar greedy approximation experiments"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  unsigned threads = 1;

  struct Command {
    vlg::Experiment kind;
    CLI::App* app;
  };
  std::vector<Command> commands;
  const std::pair<vlg::Experiment, const char*> specs[] = {
      {vlg::Experiment::Norm, "Indicator norms and Jensen bound over cubes"},
      {vlg::Experiment::Greedy, "Greedy versus best-subset error profiles"},
      {vlg::Experiment::Democracy, "Democracy function estimates and slope fits"},
      {vlg::Experiment::Verify, "Run the verification batteries"},
      {vlg::Experiment::Report, "Summarize results in the output directory"},
  };
  for (const auto& [kind, help] : specs) {
    auto* sub = app.add_subcommand(std::string(vlg::to_string(kind)), help);
    sub->add_option("--config", config_path, "JSON experiment config")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "Output directory (overrides output_dir)");
    sub->add_option("--seed", seed, "Seed (overrides the config)");
    sub->add_option("--threads", threads, "Worker threads; results do not depend on it")->check(CLI::PositiveNumber);
    commands.push_back({kind, sub});
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : vlg::kExitConfig;
  }

  for (const auto& c : commands) {
    if (!c.app->parsed()) continue;
    vlg::RunOptions opts;
    if (c.app->count("--out")) opts.out_dir = out_dir;
    if (c.app->count("--seed")) opts.seed = seed;
    if (c.app->count("--threads")) opts.threads = threads;
    return vlg::run_experiment(c.kind, config_path, opts, std::cerr);
  }
  return vlg::kExitFailure;
}
