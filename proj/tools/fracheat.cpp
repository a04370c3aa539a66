#include <CLI11.hpp>

#include <iostream>
#include <map>

#include "fracheat/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"fracheat: fractional stochastic heat equation experiments"};
  app.require_subcommand(1, 1);
  fracheat::runner::CliArgs args;
  const std::map<std::string, std::string> about{
      {"kernel", "tabulate p_t and its two-sided bound"},
      {"noise", "sample the noise and check its time covariance"},
      {"simulate", "run the solver, write snapshots and structure functions"},
      {"estimate", "simulate, fit Holder exponents, compare with the theorem"},
      {"verify", "run every deterministic check"},
      {"report", "merge run directories into summary.json and plot.csv"},
  };

  for (const auto& name : fracheat::runner::subcommand_names()) {
    auto* sub = app.add_subcommand(name, about.at(name));
    sub->add_option("--config", args.config, "JSON config file");
    sub->add_option("--out", args.out, "output directory")->capture_default_str();
    sub->add_option("--seed", args.seed, "override seed_base");
    sub->add_option("--paths", args.paths, "override solver.paths");
    if (name == "report") sub->add_option("runs", args.runs, "run directories to merge");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  args.subcommand = app.get_subcommands().front()->get_name();
  return fracheat::runner::run(args, std::cout, std::cerr);
}
