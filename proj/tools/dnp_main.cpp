#include <omp.h>

#include <iostream>

#include "CLI11.hpp"
#include "dnp/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"dnp: doubly nonlinear parabolic solver"};
  app.require_subcommand(1, 1);
  dnp::CommandArgs args;
  int threads = 0;
  app.add_option("--threads", threads, "OpenMP threads (0: runtime default)")->check(CLI::NonNegativeNumber);

  const std::pair<const char*, const char*> commands[] = {
      {"run", "integrate the scheme and write the ledger, snapshots and reports"},
      {"stationary", "solve the stationary problem along the epsilon ladder"},
      {"continuation", "rerun on a (tau, eps, nu) ladder and compare successive rungs"},
      {"depend", "continuous dependence on perturbed initial data"},
      {"fit", "run to the omega-limit and fit the decay law"},
      {"validate", "check the scenario hypotheses and print the report"}};
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", args.config, "TOML scenario")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", args.out, "output directory (overrides [output].dir)");
    sub->add_option("--threads", threads, "OpenMP threads");
    sub->add_option("--checkpoint-every", args.checkpoint_every, "snapshot stride in steps");
    sub->callback([&args, name] { args.command = name; });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : dnp::kExitValidation;
  }
  if (threads > 0) omp_set_num_threads(threads);
  return dnp::run_command(args, std::cout, std::cerr);
}
