#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>

#include "cli.hpp"
#include "plevy/error.hpp"
#include "plevy/parallel.hpp"

using namespace plevy;

int main(int argc, char** argv) {
  CLI::App app{"Nonlocal p-Levy operators: constants, solves and convergence sweeps"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string config_path, out_dir, g_expr;
  std::vector<double> eps_list;
  int threads = 0;
  std::uint64_t seed = 0;
  app.add_option("--config", config_path, "JSON configuration file");
  app.add_option("--out-dir", out_dir, "output directory (overrides out_dir)");
  app.add_option("--threads", threads, "worker threads (falls back to PLEVY_THREADS)")->check(CLI::Range(1, 1024));
  auto* seed_opt = app.add_option("--seed", seed, "seed for randomised diagnostics");

  app.add_subcommand("constants", "tables of K, C, C~ and a");
  app.add_subcommand("kernel-check", "mass and tail checks along the ladder");
  app.add_subcommand("pointwise", "L_eps u(x) against -K Delta_p u(x)");
  app.add_subcommand("solve", "one variational solve");
  auto* trace = app.add_subcommand("trace", "nonlocal against local trace norms");
  trace->add_option("--g", g_expr, "boundary datum g(x)");
  trace->add_option("--eps-list", eps_list, "eps ladder")->delimiter(',');
  std::string sweep_name;
  auto* sweep = app.add_subcommand("sweep", "convergence sweep");
  sweep->add_option("name", sweep_name, "bbm|collapse|dirichlet|neumann|weakdata|fractional|functional")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : cli::kValidation;
  }

  cli::Config cfg;
  try {
    nlohmann::json raw = nlohmann::json::object();
    if (!config_path.empty()) raw = cli::load_config(config_path).raw;
    if (!g_expr.empty()) raw["g"] = g_expr;
    if (!eps_list.empty()) raw["ladder"] = eps_list;
    cfg = cli::parse_config(raw);
  } catch (const std::exception& e) {
    std::cerr << "plevy: " << e.what() << '\n';
    return cli::exit_code_for(e);
  }
  if (!out_dir.empty()) cfg.out_dir = out_dir;
  if (*seed_opt) {
    cfg.seed = seed;
    cfg.sweep.solver.seed = seed;
  }
  if (threads == 0) {
    if (const char* env = std::getenv("PLEVY_THREADS")) threads = std::atoi(env);
  }
  if (threads <= 0) threads = cfg.threads;
  set_threads(threads > 0 ? threads : 1);

  const auto* sub = app.get_subcommands().front();
  return cli::run(sub->get_name(), sweep_name, cfg, std::cerr);
}
