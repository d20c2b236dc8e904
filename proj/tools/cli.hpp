#pragma once

#include <cstdint>
#include <iosfwd>
#include <json.hpp>
#include <map>
#include <optional>
#include <string>

#include "plevy/experiments.hpp"

namespace plevy::cli {

enum ExitCode : int { kOk = 0, kValidation = 2, kSolver = 3, kGuard = 4 };

/// Validated run configuration. Every key of the JSON document is checked;
/// unknown keys are rejected.
struct Config {
  nlohmann::json raw = nlohmann::json::object();
  SweepSettings sweep;
  std::map<std::string, std::string> exprs;
  double x = 0.3;        ///< pointwise evaluation point
  double delta = 0.5;    ///< certificate radius / tail probe radius
  int tau = 0;           ///< functional sweep: 0 Dirichlet, 1 Neumann
  bool regional = false; ///< neumann sweep: regional variant
  std::string problem = "nonlocal_dirichlet";
  double eps = 0.1;
  std::array<double, 2> boundary{0.0, 0.0};
  std::string out_dir = "out";
  std::uint64_t seed = 20240531;
  int threads = 0;  ///< 0 = not set in the file
  nlohmann::json constants = nlohmann::json::object();

  Expression expr(const std::string& key) const;
};

/// Throws Error(Validation) naming the offending key.
Config parse_config(const nlohmann::json& j);
Config load_config(const std::string& path);

/// Command names: constants, kernel-check, pointwise, solve, trace, sweep.
/// `target` is the sweep name for `sweep`. Writes into cfg.out_dir and returns
/// an exit code; errors are reported on `err`.
int run(const std::string& command, const std::string& target, const Config& cfg, std::ostream& err);

/// Exit code for a caught library error.
int exit_code_for(const std::exception& e);

}  // namespace plevy::cli
