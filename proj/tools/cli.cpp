#include "cli.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <set>

#include "plevy/error.hpp"
#include "plevy/operators.hpp"
#include "plevy/traces.hpp"

namespace plevy::cli {

using nlohmann::json;

namespace {

const std::map<std::string, std::string> kDefaultExprs{
    {"u", "max(0,1-abs(x))"}, {"v", "x"}, {"f", "1"}, {"g", "0"}, {"phi", "x"},
    {"bump", "max(0,1-16*(x-0.5)^2)^3"}};

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  require(j.is_object(), ErrorKind::Validation, where + " must be a JSON object");
  for (const auto& [k, _] : j.items())
    require(allowed.count(k) != 0, ErrorKind::Validation, "unknown key '" + k + "' in " + where);
}

double num(const json& j, const std::string& key, double lo, double hi, bool lo_open = true) {
  require(j.is_number(), ErrorKind::Validation, "'" + key + "' must be a number");
  const double v = j.get<double>();
  const bool ok = std::isfinite(v) && (lo_open ? v > lo : v >= lo) && v <= hi;
  require(ok, ErrorKind::Validation, "'" + key + "' = " + std::to_string(v) + " is out of range");
  return v;
}

int integer(const json& j, const std::string& key, int lo, int hi) {
  require(j.is_number_integer(), ErrorKind::Validation, "'" + key + "' must be an integer");
  const auto v = j.get<long long>();
  require(v >= lo && v <= hi, ErrorKind::Validation, "'" + key + "' is out of range");
  return static_cast<int>(v);
}

std::vector<double> num_list(const json& j, const std::string& key, double lo, double hi) {
  require(j.is_array() && !j.empty(), ErrorKind::Validation, "'" + key + "' must be a non-empty array");
  std::vector<double> out;
  for (const auto& e : j) out.push_back(num(e, key, lo, hi));
  return out;
}

SolveConfig parse_solver(const json& j) {
  reject_unknown(j,
                 {"grad_tol", "j_tol", "max_iter", "memory", "schedule", "armijo", "backtrack", "max_backtracks",
                  "refresh", "precond_reach"},
                 "solver");
  SolveConfig c;
  if (j.contains("grad_tol")) c.grad_tol = num(j["grad_tol"], "solver.grad_tol", 0.0, 1.0);
  if (j.contains("j_tol")) c.j_tol = num(j["j_tol"], "solver.j_tol", 0.0, 1.0, false);
  if (j.contains("max_iter")) c.max_iter = integer(j["max_iter"], "solver.max_iter", 1, 10000000);
  if (j.contains("memory")) c.memory = integer(j["memory"], "solver.memory", 1, 100);
  if (j.contains("schedule")) {
    c.schedule = num_list(j["schedule"], "solver.schedule", -1.0, 1.0);
    require(c.schedule.back() == 0.0, ErrorKind::Validation, "solver.schedule must end at 0");
    for (double d : c.schedule) require(d >= 0.0, ErrorKind::Validation, "solver.schedule entries must be >= 0");
  }
  if (j.contains("armijo")) c.armijo = num(j["armijo"], "solver.armijo", 0.0, 0.5);
  if (j.contains("backtrack")) c.backtrack = num(j["backtrack"], "solver.backtrack", 0.0, 0.99);
  if (j.contains("max_backtracks")) c.max_backtracks = integer(j["max_backtracks"], "solver.max_backtracks", 1, 200);
  if (j.contains("refresh")) c.refresh = integer(j["refresh"], "solver.refresh", 1, 100000);
  if (j.contains("precond_reach")) c.precond_reach = integer(j["precond_reach"], "solver.precond_reach", 1, 100000);
  return c;
}

Domain parse_domain(const json& j, int d) {
  require(j.is_array(), ErrorKind::Validation, "'domain' must be an array");
  std::vector<double> v;
  for (const auto& e : j) {
    require(e.is_number(), ErrorKind::Validation, "'domain' entries must be numbers");
    v.push_back(e.get<double>());
  }
  Domain dom;
  if (d == 1) {
    require(v.size() == 2, ErrorKind::Validation, "'domain' needs [a, b] when d = 1");
    dom = Domain::interval(v[0], v[1]);
  } else {
    require(v.size() == 4, ErrorKind::Validation, "'domain' needs [x0, x1, y0, y1] when d = 2");
    dom = Domain::rectangle(v[0], v[1], v[2], v[3]);
  }
  try {
    dom.validate();
  } catch (const Error& e) {
    raise(ErrorKind::Validation, std::string("invalid domain: ") + e.what());
  }
  return dom;
}

}  // namespace

Expression Config::expr(const std::string& key) const {
  const auto it = exprs.find(key);
  const std::string& text = it != exprs.end() ? it->second : kDefaultExprs.at(key);
  Expression e = Expression::parse(text);
  require(e.arity() <= sweep.d, ErrorKind::Validation, "expression '" + key + "' uses y in one dimension");
  return e;
}

Config parse_config(const json& j) {
  reject_unknown(j,
                 {"name", "p", "d", "domain", "family", "quadrature", "ladder", "spacing_ratio", "max_spacing",
                  "fixed_spacing", "tau_tail", "local_spacing", "guard", "final_guard", "u", "v", "f", "g", "phi",
                  "bump", "x", "delta", "tau", "regional", "problem", "eps", "boundary", "solver", "out_dir",
                  "seed", "threads", "constants"},
                 "config");
  Config c;
  c.raw = j;
  auto& s = c.sweep;
  if (j.contains("name")) require(j["name"].is_string(), ErrorKind::Validation, "'name' must be a string");
  if (j.contains("p")) s.p = num(j["p"], "p", 1.0, 100.0);
  if (j.contains("d")) s.d = integer(j["d"], "d", 1, 2);
  s.domain = j.contains("domain") ? parse_domain(j["domain"], s.d)
                                  : (s.d == 1 ? Domain::interval(0.0, 1.0) : Domain::rectangle(0.0, 1.0, 0.0, 1.0));
  if (j.contains("family")) {
    require(j["family"].is_string(), ErrorKind::Validation, "'family' must be a string");
    s.family = j["family"].get<std::string>();
    require(s.family == "rescaled" || s.family == "rescaled-algebraic" || s.family == "fractional",
            ErrorKind::Validation, "'family' must be rescaled, rescaled-algebraic or fractional");
  }
  if (j.contains("quadrature")) {
    const std::string q = j["quadrature"].is_string() ? j["quadrature"].get<std::string>() : "";
    require(q == "cell-averaged" || q == "point-sampled", ErrorKind::Validation,
            "'quadrature' must be cell-averaged or point-sampled");
    s.quadrature = q == "cell-averaged" ? KernelQuadrature::CellAveraged : KernelQuadrature::PointSampled;
  }
  if (j.contains("ladder")) s.ladder = num_list(j["ladder"], "ladder", 0.0, 1.0 - 1e-12);
  if (j.contains("spacing_ratio")) s.spacing_ratio = num(j["spacing_ratio"], "spacing_ratio", 1.0, 1e4, false);
  if (j.contains("max_spacing")) s.max_spacing = num(j["max_spacing"], "max_spacing", 0.0, 1.0);
  if (j.contains("fixed_spacing")) s.fixed_spacing = num(j["fixed_spacing"], "fixed_spacing", 0.0, 1.0, false);
  if (j.contains("tau_tail")) s.tau_tail = num(j["tau_tail"], "tau_tail", 0.0, 1.0);
  if (j.contains("local_spacing")) s.local_spacing = num(j["local_spacing"], "local_spacing", 0.0, 0.5);
  if (j.contains("guard")) s.guard = num(j["guard"], "guard", 0.0, 10.0);
  if (j.contains("final_guard")) s.final_guard = num(j["final_guard"], "final_guard", 0.0, 10.0);
  if (j.contains("solver")) s.solver = parse_solver(j["solver"]);
  for (const char* k : {"u", "v", "f", "g", "phi", "bump"}) {
    if (!j.contains(k)) continue;
    require(j[k].is_string(), ErrorKind::Validation, std::string("'") + k + "' must be an expression string");
    c.exprs[k] = j[k].get<std::string>();
    try {
      (void)c.expr(k);
    } catch (const Error& e) {
      raise(ErrorKind::Validation, std::string("'") + k + "': " + e.what());
    }
  }
  if (j.contains("x")) c.x = num(j["x"], "x", -1e6, 1e6);
  if (j.contains("delta")) c.delta = num(j["delta"], "delta", 0.0, 1.0 - 1e-12);
  if (j.contains("tau")) c.tau = integer(j["tau"], "tau", 0, 1);
  if (j.contains("regional")) {
    require(j["regional"].is_boolean(), ErrorKind::Validation, "'regional' must be a boolean");
    c.regional = j["regional"].get<bool>();
  }
  if (j.contains("problem")) {
    require(j["problem"].is_string(), ErrorKind::Validation, "'problem' must be a string");
    c.problem = j["problem"].get<std::string>();
    static const std::set<std::string> kinds{"nonlocal_dirichlet", "nonlocal_neumann", "regional_neumann",
                                             "local_dirichlet", "local_neumann"};
    require(kinds.count(c.problem) != 0, ErrorKind::Validation, "unknown problem '" + c.problem + "'");
  }
  if (j.contains("eps")) c.eps = num(j["eps"], "eps", 0.0, 1.0 - 1e-12);
  if (j.contains("boundary")) {
    const auto b = num_list(j["boundary"], "boundary", -1e12, 1e12);
    require(b.size() == 2, ErrorKind::Validation, "'boundary' needs two values");
    c.boundary = {b[0], b[1]};
  }
  if (j.contains("out_dir")) {
    require(j["out_dir"].is_string(), ErrorKind::Validation, "'out_dir' must be a string");
    c.out_dir = j["out_dir"].get<std::string>();
  }
  if (j.contains("seed")) {
    require(j["seed"].is_number_unsigned(), ErrorKind::Validation, "'seed' must be a non-negative integer");
    c.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("threads")) c.threads = integer(j["threads"], "threads", 1, 1024);
  if (j.contains("constants")) {
    reject_unknown(j["constants"], {"d", "p", "s", "eps"}, "constants");
    c.constants = j["constants"];
  }
  s.solver.seed = c.seed;
  return c;
}

Config load_config(const std::string& path) {
  std::ifstream in(path);
  require(bool(in), ErrorKind::Validation, "cannot read config '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    raise(ErrorKind::Validation, "config '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_config(j);
}

int exit_code_for(const std::exception& e) {
  if (const auto* pe = dynamic_cast<const Error*>(&e)) {
    switch (pe->kind()) {
      case ErrorKind::Solver:
      case ErrorKind::Consistency: return kSolver;
      case ErrorKind::Guard: return kGuard;
      default: return kValidation;
    }
  }
  if (dynamic_cast<const json::exception*>(&e)) return kValidation;
  return kSolver;
}

namespace {

void write_text(const std::string& dir, const std::string& file, const std::string& text) {
  std::filesystem::create_directories(dir);
  std::ofstream out(std::filesystem::path(dir) / file, std::ios::binary);
  out << text;
  require(bool(out), ErrorKind::Validation, "cannot write " + file + " in " + dir);
}

std::vector<double> list_or(const json& j, const char* key, std::vector<double> fallback) {
  if (!j.contains(key)) return fallback;
  std::vector<double> out;
  for (const auto& e : j[key]) {
    require(e.is_number(), ErrorKind::Validation, std::string("constants.") + key + " entries must be numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

/// Values of a special-function table; NaN entries mark undefined cells.
json constants_table(const Config& c) {
  const auto ds = list_or(c.constants, "d", {1, 2});
  const auto ps = list_or(c.constants, "p", {1.5, 2, 3, 4});
  const auto ss = list_or(c.constants, "s", {0.25, 0.5, 0.75});
  const auto es = list_or(c.constants, "eps", {0.4, 0.2, 0.1, 0.05});
  json out;
  out["K"] = json::array();
  out["C"] = json::array();
  out["C_tilde"] = json::array();
  out["a"] = json::array();
  for (double dd : ds) {
    require(dd == 1.0 || dd == 2.0, ErrorKind::Validation, "constants.d entries must be 1 or 2");
    const int d = static_cast<int>(dd);
    for (double p : ps) {
      const ExponentDim pd(p, d);
      out["K"].push_back({{"d", d}, {"p", p}, {"value", k_const(pd)}});
      for (double s : ss) {
        out["C"].push_back({{"d", d}, {"p", p}, {"s", s}, {"value", c_frac(pd, s)}});
        out["C_tilde"].push_back({{"d", d}, {"p", p}, {"s", s}, {"value", c_tilde(pd, s)}});
      }
      for (double e : es) out["a"].push_back({{"d", d}, {"p", p}, {"eps", e}, {"value", a_scaling(pd, e)}});
    }
  }
  return out;
}

SweepReport kernel_check(const Config& c) {
  const auto& s = c.sweep;
  SweepReport r;
  r.name = "kernel_check";
  r.columns = {"eps", "mass", "mass_error", "tail", "tail_quadrature", "tail_closed_form", "inner_moment"};
  r.gap_columns = {{"mass_error", 1e-3, GuardKind::Final, 1e-3}, {"tail", 1.0, GuardKind::RatioToFirst, 1e-14}};
  r.meta["family"] = s.family;
  r.meta["p"] = s.p;
  r.meta["d"] = s.d;
  r.meta["delta"] = c.delta;
  for (double eps : s.ladder) {
    const Kernel k = make_kernel(s, eps);
    const double m = plevy_mass(k);
    const auto cf = k.tail_closed_form(c.delta);
    r.add_row({eps, m, std::abs(m - 1.0), tail_mass(k, c.delta), tail_mass_quadrature(k, c.delta),
               cf ? *cf : -1.0, inner_moment(k, c.delta)});
  }
  r.meta["closed_form_note"] = "tail_closed_form = -1 when the family has none";
  return r;
}

SweepReport solve_once(const Config& c) {
  const auto& s = c.sweep;
  SweepReport r;
  r.name = "solve";
  r.columns = s.d == 1 ? std::vector<std::string>{"x", "in_omega", "u"}
                       : std::vector<std::string>{"x", "y", "in_omega", "u"};
  const bool local = c.problem.rfind("local_", 0) == 0;
  Solution sol;
  GridPtr grid;
  if (local) {
    grid = build_grid(s.domain, s.local_spacing, s.local_spacing);
    const GridFunction f = sample(c.expr("f"), grid);
    Problem pr = c.problem == "local_dirichlet" ? Problem::local_dirichlet(grid, s.p, f, c.boundary)
                                                : Problem::local_neumann(grid, s.p, f, c.boundary);
    sol = solve(pr, s.solver);
  } else {
    const auto m = make_model(s, make_kernel(s, c.eps), c.eps);
    grid = m->grid_ptr();
    const GridFunction f = sample(c.expr("f"), grid);
    if (c.problem == "nonlocal_dirichlet") {
      sol = solve(Problem::nonlocal_dirichlet(m, f, sample(c.expr("g"), grid)), s.solver);
    } else if (c.problem == "nonlocal_neumann") {
      // Collar data: N_eps phi when phi is given, otherwise the density g.
      GridFunction g(grid);
      const GridFunction src = c.exprs.count("phi") ? apply_L_and_N(*m, sample(c.expr("phi"), grid))
                                                    : sample(c.expr("g"), grid);
      for (std::size_t i : grid->collar_nodes()) g[i] = src[i];
      sol = solve(Problem::nonlocal_neumann(m, f, g), s.solver);
    } else {
      sol = solve(Problem::regional_neumann(m, f), s.solver);
    }
    r.meta["neglected_tail"] = m->weights().neglected_tail();
  }
  for (std::size_t i = 0; i < grid->size(); ++i) {
    std::vector<double> row{grid->coord(i, 0)};
    if (s.d == 2) row.push_back(grid->coord(i, 1));
    row.push_back(grid->in_omega(i) ? 1.0 : 0.0);
    row.push_back(sol.u[i]);
    r.add_row(std::move(row));
  }
  r.meta["problem"] = c.problem;
  r.meta["eps"] = c.eps;
  r.meta["J"] = sol.j;
  r.meta["iterations"] = sol.iterations;
  r.meta["grad_norm"] = sol.grad_norm;
  r.meta["grad_scale"] = sol.grad_scale;
  r.meta["regularization_residual"] = sol.regularization_residual;
  return r;
}

SweepReport dispatch_sweep(const std::string& name, const Config& c) {
  const auto& s = c.sweep;
  if (name == "bbm") return bbm_sweep(c.expr("u"), s);
  if (name == "collapse") return collapse_sweep(c.expr("u"), c.expr("v"), s);
  if (name == "dirichlet") return dirichlet_convergence(c.expr("f"), c.expr("g"), s);
  if (name == "neumann") return neumann_convergence(c.expr("f"), c.expr("phi"), s, c.regional);
  if (name == "weakdata") return weak_data_convergence(c.expr("phi"), c.expr("v"), s);
  if (name == "fractional") return fractional_sweep(c.expr("f"), c.expr("g"), c.expr("bump"), s);
  if (name == "functional") return functional_convergence(c.expr("v"), c.tau, c.expr("f"), c.expr("g"), s);
  raise(ErrorKind::Validation, "unknown sweep '" + name +
                                   "' (bbm, collapse, dirichlet, neumann, weakdata, fractional, functional)");
}

int finish(SweepReport r, const Config& c, const std::string& command, bool guarded) {
  r.meta["fingerprint"] = fingerprint(command + "\n" + c.raw.dump());
  r.meta["config"] = c.raw;
  write_report(r, c.out_dir);
  if (!guarded) return kOk;
  for (const auto& v : verdicts(r))
    if (!v.pass()) return kGuard;
  return kOk;
}

}  // namespace

int run(const std::string& command, const std::string& target, const Config& c, std::ostream& err) {
  try {
    if (command == "constants") {
      json out = constants_table(c);
      out["fingerprint"] = fingerprint(command + "\n" + c.raw.dump());
      write_text(c.out_dir, "constants.json", out.dump(2) + "\n");
      return kOk;
    }
    if (command == "kernel-check") return finish(kernel_check(c), c, command, true);
    if (command == "pointwise") return finish(pointwise_sweep(c.expr("u"), c.x, c.sweep), c, command, true);
    if (command == "solve") return finish(solve_once(c), c, command, false);
    if (command == "trace") return finish(trace_convergence_report(c.expr("g"), c.sweep), c, command, true);
    if (command == "sweep") {
      SweepReport r = dispatch_sweep(target, c);
      return finish(std::move(r), c, command + " " + target, true);
    }
    raise(ErrorKind::Validation, "unknown command '" + command + "'");
  } catch (const std::exception& e) {
    const int code = exit_code_for(e);
    err << "plevy: " << e.what() << '\n';
    return code;
  }
}

}  // namespace plevy::cli
