#include "evoctrl/cli.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <sstream>

using namespace evoctrl;

namespace {

bool is_experiment_name(const std::string &s) {
  return s == "heat" || s == "heat5" || s == "wave" || s == "custom";
}

int run(const std::string &source, const std::vector<std::string> &sets) {
  ExperimentConfig cfg;
  try {
    if (is_experiment_name(source))
      cfg.experiment = source;
    else
      cfg = ExperimentConfig::from_file(source);
    for (const auto &s : sets)
      cfg.set(s);
    cfg.validate();
  } catch (const ConfigError &e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 3;
  }
  const ExperimentReport rep = run_experiment(cfg);
  std::cout << "experiment " << rep.experiment << ": " << rep.result.iterations << " iterations, "
            << (rep.result.converged ? "converged" : "NOT converged") << ", " << rep.runtime
            << " s\n";
  for (const auto &[k, v] : rep.metrics)
    std::cout << "  " << k << " = " << v << '\n';
  if (!rep.out_dir.empty())
    std::cout << "artifacts in " << rep.out_dir << '\n';
  return rep.result.converged ? 0 : 2;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"evoctrl: optimal control of linear evolution equations"};
  app.require_subcommand(1);

  auto *run_cmd = app.add_subcommand("run", "Run an experiment");
  std::string source;
  std::vector<std::string> sets;
  run_cmd->add_option("config", source, "Config file, or one of heat, heat5, wave, custom")
      ->required();
  run_cmd->add_option("--set", sets, "Override key=value (repeatable)");

  auto *check_cmd = app.add_subcommand("check", "Run the invariant suite");
  std::uint64_t seed = 1;
  bool corrupt = false;
  check_cmd->add_option("--seed", seed, "Random seed");
  check_cmd->add_flag("--corrupt-adjoint", corrupt, "Test hook: flip a sign in the adjoint");

  auto *mesh_cmd = app.add_subcommand("mesh", "Write the L-shaped mesh");
  Index n = 8;
  std::string out = "mesh";
  mesh_cmd->add_option("--n", n, "Cells per unit length")->check(CLI::PositiveNumber);
  mesh_cmd->add_option("--out", out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 3;
  }

  try {
    if (*run_cmd)
      return run(source, sets);
    if (*check_cmd) {
      const auto results = check_suite({seed, corrupt});
      write_check_report(std::cout, results);
      for (const auto &r : results)
        if (!r.passed)
          return 1;
      return 0;
    }
    write_mesh(n, out);
    std::cout << "mesh written to " << out << '\n';
    return 0;
  } catch (const ConfigError &e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
