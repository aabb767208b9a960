#include "rsgame/cli.hpp"

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "rsgame/birthdeath.hpp"
#include "rsgame/checks.hpp"
#include "rsgame/errors.hpp"
#include "rsgame/kernels.hpp"
#include "rsgame/model_io.hpp"
#include "rsgame/montecarlo.hpp"
#include "rsgame/report_io.hpp"
#include "rsgame/shapley.hpp"

namespace rsgame {
namespace {

using nlohmann::json;

struct UsageError : Error {
  using Error::Error;
};

std::vector<int> parse_int_list(const std::string& text, const std::string& flag) {
  // Accepts "a,b,c", "a..b" and mixtures such as "0..4,7".
  std::vector<int> out;
  std::stringstream ss(text);
  std::string part;
  try {
    while (std::getline(ss, part, ',')) {
      const auto dots = part.find("..");
      if (dots == std::string::npos) {
        out.push_back(std::stoi(part));
      } else {
        const int lo = std::stoi(part.substr(0, dots)), hi = std::stoi(part.substr(dots + 2));
        if (hi < lo) throw UsageError(flag + ": empty range " + part);
        for (int k = lo; k <= hi; ++k) out.push_back(k);
      }
    }
  } catch (const std::logic_error&) {
    throw UsageError(flag + ": cannot parse '" + text + "'");
  }
  if (out.empty()) throw UsageError(flag + ": empty list");
  return out;
}

void emit(const json& doc, const std::string& path, std::ostream& out) {
  if (path.empty())
    out << dump_json(doc) << '\n';
  else
    write_json(doc, path);
}

void write_text(const std::string& text, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw UsageError("cannot write " + path);
  f << text;
}

struct Options {
  int threads = 0;
  std::string model, out, trace, strategies, report, paths_csv, deviate, representation, starts;
  std::string ladder;
  double tol = 0.0, tol_local = 1e-8, tol_eig = 1e-8, tol_outer = 1e-6;
  long horizon = 2000, paths = 20000;
  std::uint64_t seed = 1;
  int start = 0, deviations = 2, samples = 200;
  long cap = kHittingCap;
  bool saddle = false, absorb = false, tilted = false, conditional = false;
  BirthDeathParams bd;
  int grid = 5;
  bool no_lift = false;
};

int cmd_validate(const Options& o, std::ostream& out) {
  const GameModel m = load_model(o.model);
  const ValidationReport r = validate_model(m);
  emit(to_json(r), o.out, out);
  return r.ok() ? 0 : 1;
}

int cmd_check(const Options& o, std::ostream& out) {
  const GameModel m = load_model(o.model);
  json doc;
  bool ok = true;
  if (m.lyapunov()) {
    const LyapunovReport ly = check_lyapunov(m);
    doc["lyapunov"] = to_json(ly);
    ok = ok && ly.pass;
  } else {
    doc["lyapunov"] = json();
  }
  const auto suff = check_irreducibility(m, IrreducibilityMode::sufficient);
  const auto samp = check_irreducibility(m, IrreducibilityMode::sampled, o.samples, o.seed);
  doc["irreducibility"] = {{"sufficient", to_json(suff)}, {"sampled", to_json(samp)}};
  const bool ref = check_reference_state(m);
  doc["reference_state"] = {{"i0", m.i0()}, {"pass", ref}};
  // The sufficient test failing proves nothing; a sampled counterexample does.
  ok = ok && samp.pass && ref;
  doc["pass"] = ok;
  emit(doc, o.out, out);
  return ok ? 0 : 1;
}

SolveOptions solve_options(const Options& o) {
  SolveOptions so;
  if (!o.ladder.empty()) so.ladder = parse_int_list(o.ladder, "--ladder");
  so.tol_local = o.tol > 0.0 ? o.tol : o.tol_local;
  so.tol_eig = o.tol > 0.0 ? o.tol : o.tol_eig;
  so.tol_outer = o.tol_outer;
  if (!(so.tol_local > 0.0) || !(so.tol_eig > 0.0) || !(so.tol_outer > 0.0))
    throw UsageError("tolerances must be > 0");
  return so;
}

int cmd_solve(const Options& o, std::ostream& out, std::ostream& err) {
  const GameModel m = load_model(o.model);
  const SolveOptions so = solve_options(o);
  SolveReport r;
  try {
    r = solve_ergodic_game(m, so);
  } catch (const CollapseToZero& e) {
    err << e.what() << '\n';
    return 1;
  } catch (const NoConvergence& e) {
    err << e.what() << '\n';
    return 1;
  }
  emit(to_json(r), o.out, out);
  if (!o.trace.empty()) write_text(ladder_csv(r), o.trace);
  for (const auto& w : r.warnings) err << "warning: " << w << '\n';
  return r.certified ? 0 : 1;
}

SimConfig sim_config(const Options& o) {
  SimConfig c;
  c.horizon = o.horizon;
  c.paths = o.paths;
  c.seed = o.seed;
  c.start = o.start;
  c.absorb_exit = o.absorb;
  return c;
}

int cmd_simulate(const Options& o, std::ostream& out) {
  const GameModel m = load_model(o.model);
  const SolveReport rep = load_solve_report(o.strategies);
  const SimConfig cfg = sim_config(o);
  json doc;
  doc["estimate"] = to_json(estimate_ergodic_cost(m, rep.selectors.p1, rep.selectors.p2, cfg));
  if (!o.paths_csv.empty())
    simulate_paths(m, rep.selectors.p1, rep.selectors.p2, cfg).write_csv(o.paths_csv);
  if (!o.deviate.empty()) {
    const auto colon = o.deviate.find(':');
    if (colon == std::string::npos) throw UsageError("--deviate expects player:count");
    int player = 0, count = 0;
    try {
      player = std::stoi(o.deviate.substr(0, colon));
      count = std::stoi(o.deviate.substr(colon + 1));
    } catch (const std::logic_error&) {
      throw UsageError("--deviate expects player:count");
    }
    if ((player != 1 && player != 2) || count < 1) throw UsageError("--deviate: player 1|2, count >= 1");
    std::mt19937_64 rng(o.seed ^ 0x5bd1e995ULL);
    std::exponential_distribution<double> expo(1.0);
    json devs = json::array();
    for (int k = 0; k < count; ++k) {
      std::vector<std::vector<double>> w(m.num_states());
      for (int i = 0; i < m.num_states(); ++i) {
        w[i].resize(num_actions(m, player, i));
        double s = 0.0;
        for (double& x : w[i]) s += (x = expo(rng));
        for (double& x : w[i]) x /= s;
      }
      SimConfig c = cfg;
      c.deviation = DeviationSpec{player, {}, StationaryStrategy(w)};
      devs.push_back({{"player", player},
                      {"strategy", w},
                      {"estimate", to_json(estimate_ergodic_cost(m, rep.selectors.p1, rep.selectors.p2, c))}});
    }
    doc["deviations"] = devs;
  }
  emit(doc, o.out, out);
  return 0;
}

int cmd_verify(const Options& o, std::ostream& out) {
  const GameModel m = load_model(o.model);
  const SolveReport rep = load_solve_report(o.report);
  if (!o.saddle && o.representation.empty())
    throw UsageError("verify: pass --saddle and/or --representation");
  const SimConfig cfg = sim_config(o);
  json doc;
  bool ok = true;
  doc["rho_star"] = rep.rho_star;
  if (o.saddle) {
    const SaddleVerdict v = verify_saddle(m, rep, cfg, o.deviations, o.tilted);
    doc["saddle"] = to_json(v);
    ok = ok && v.pass;
  }
  if (!o.representation.empty()) {
    std::string spec = o.representation;
    if (spec.rfind("B=", 0) == 0) spec = spec.substr(2);
    const std::vector<int> target = parse_int_list(spec, "--representation");
    std::vector<int> starts;
    if (!o.starts.empty()) {
      starts = parse_int_list(o.starts, "--starts");
    } else {
      const int top = *std::max_element(target.begin(), target.end());
      for (int s : {top + 2, top + 6})
        if (s < m.num_states()) starts.push_back(s);
      if (starts.empty()) throw UsageError("--representation: no default start outside B; pass --starts");
    }
    const RepresentationVerdict v = verify_stochastic_representation(m, rep, target, starts, cfg, o.cap,
                                                                         o.conditional);
    doc["representation"] = to_json(v);
    ok = ok && v.verdict == Verdict::pass;
  }
  doc["verdict"] = ok ? "PASS" : "FAIL";
  emit(doc, o.out, out);
  return ok ? 0 : 1;
}

int cmd_example(const Options& o, std::ostream& out, std::ostream& err) {
  BirthDeathParams p = o.bd;
  p.grid_u = p.grid_v = o.grid;
  p.lift_costs = !o.no_lift;
  BirthDeathLog log;
  const GameModel m = build_birth_death(p, &log);
  for (const auto& n : log.notes) err << "note: " << n << '\n';
  emit(model_to_json(m), o.out, out);
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Risk-sensitive ergodic zero-sum stochastic game solver and verifier", "rsgame"};
  app.require_subcommand(1);
  Options o;
  app.add_option("--threads", o.threads, "OpenMP worker cap (default: hardware parallelism)")
      ->check(CLI::NonNegativeNumber);

  auto* validate = app.add_subcommand("validate", "Check model well-formedness");
  validate->add_option("model", o.model, "Model JSON")->required();
  validate->add_option("--out", o.out, "Report path (default stdout)");

  auto* check = app.add_subcommand("check", "Lyapunov, irreducibility and reference-state checks");
  check->add_option("model", o.model, "Model JSON")->required();
  check->add_option("--samples", o.samples, "Sampled strategy pairs for irreducibility")
      ->check(CLI::PositiveNumber);
  check->add_option("--seed", o.seed, "Sampling seed");
  check->add_option("--out", o.out, "Report path (default stdout)");

  auto* solve = app.add_subcommand("solve", "Solve the Shapley equation on a truncation ladder");
  solve->add_option("model", o.model, "Model JSON")->required();
  solve->add_option("--ladder", o.ladder, "Domain sizes, e.g. 10,20,40");
  solve->add_option("--tol", o.tol, "Sets both tol_local and tol_eig");
  solve->add_option("--tol-local", o.tol_local, "Local saddle gap tolerance");
  solve->add_option("--tol-eig", o.tol_eig, "Collatz-Wielandt bracket tolerance");
  solve->add_option("--tol-outer", o.tol_outer, "Ladder agreement tolerance");
  solve->add_option("--out", o.out, "Report path (default stdout)");
  solve->add_option("--trace", o.trace, "Ladder CSV path");

  auto* simulate = app.add_subcommand("simulate", "Estimate the ergodic cost under a solved selector pair");
  simulate->add_option("model", o.model, "Model JSON")->required();
  simulate->add_option("--strategies", o.strategies, "Solve report with selectors")->required();
  simulate->add_option("--T", o.horizon, "Horizon")->check(CLI::PositiveNumber);
  simulate->add_option("--N", o.paths, "Paths")->check(CLI::PositiveNumber);
  simulate->add_option("--seed", o.seed, "Seed");
  simulate->add_option("--start", o.start, "Start state");
  simulate->add_option("--deviate", o.deviate, "player:count random stationary deviations");
  simulate->add_option("--paths-csv", o.paths_csv, "Write the path batch as CSV");
  simulate->add_flag("--absorb-exit", o.absorb, "Kill paths that leave the window");
  simulate->add_option("--out", o.out, "Report path (default stdout)");

  auto* verify = app.add_subcommand("verify", "Monte Carlo verification of a solve report");
  verify->add_option("model", o.model, "Model JSON")->required();
  verify->add_option("--report", o.report, "Solve report")->required();
  verify->add_flag("--saddle", o.saddle, "Check the saddle inequalities");
  verify->add_option("--representation", o.representation, "Target set, e.g. B=0..4");
  verify->add_option("--starts", o.starts, "Start states for --representation");
  verify->add_option("--deviations", o.deviations, "Deviations per player")->check(CLI::NonNegativeNumber);
  verify->add_option("--T", o.horizon, "Horizon")->check(CLI::PositiveNumber);
  verify->add_option("--N", o.paths, "Paths")->check(CLI::PositiveNumber);
  verify->add_option("--seed", o.seed, "Seed");
  verify->add_option("--start", o.start, "Start state for --saddle");
  verify->add_option("--cap", o.cap, "Hitting-time cap")->check(CLI::PositiveNumber);
  verify->add_flag("--tilted", o.tilted,
                   "Importance-sample --saddle runs with psi* and allow the finite-horizon term");
  verify->add_flag("--conditional", o.conditional,
                   "Conditional Monte Carlo for --representation (entries into B summed exactly)");
  verify->add_flag("--absorb-exit", o.absorb, "Kill paths that leave the window");
  verify->add_option("--out", o.out, "Report path (default stdout)");

  auto* example = app.add_subcommand("example", "Generate a built-in example model");
  auto* bd = example->add_subcommand("birth-death", "Controlled birth-death game");
  example->require_subcommand(1);
  bd->add_option("--p-hat", o.bd.p_hat, "Per-capita cost rate");
  bd->add_option("--delta", o.bd.delta, "Lower action bound");
  bd->add_option("--L1", o.bd.L1, "Player-1 upper action bound");
  bd->add_option("--L2", o.bd.L2, "Player-2 upper action bound");
  bd->add_option("--grid", o.grid, "Grid points per player")->check(CLI::PositiveNumber);
  bd->add_option("--window", o.bd.window, "Window size");
  bd->add_option("--theta", o.bd.theta, "Risk parameter");
  bd->add_flag("--no-lift", o.no_lift, "Keep negative costs instead of lifting them");
  bd->add_flag("--allow-p-hat", o.bd.allow_p_hat, "Accept p_hat >= 1/6");
  bd->add_option("--out", o.out, "Model path (default stdout)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  if (o.threads > 0) set_thread_count(o.threads);
  try {
    if (validate->parsed()) return cmd_validate(o, out);
    if (check->parsed()) return cmd_check(o, out);
    if (solve->parsed()) return cmd_solve(o, out, err);
    if (simulate->parsed()) return cmd_simulate(o, out);
    if (verify->parsed()) return cmd_verify(o, out);
    if (bd->parsed()) return cmd_example(o, out, err);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const IngestError& e) {
    err << "ingest error: " << e.what() << '\n';
    return 2;
  } catch (const InvalidArgument& e) {
    err << "invalid argument: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    err << e.what() << '\n';
    return 1;
  }
  return 2;
}

int run(int argc, const char* const* argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace rsgame
