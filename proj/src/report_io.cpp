#include "rsgame/report_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "rsgame/errors.hpp"
#include "rsgame/logmath.hpp"

namespace rsgame {
namespace {

using nlohmann::json;

json num(double x) { return std::isfinite(x) ? json(x) : json(); }

json nums(const std::vector<double>& xs) {
  json a = json::array();
  for (double x : xs) a.push_back(num(x));
  return a;
}

json norm_like_json(const NormLikeResult& n) {
  return {{"pass", n.pass}, {"tail_start", n.tail_start}, {"values", nums(n.values)}};
}

double get_or_neg_inf(const json& x) { return x.is_null() ? kNegInf : x.get<double>(); }

}  // namespace

json to_json(const StationaryStrategy& s) { return s.weights(); }

json to_json(const ValidationReport& r) {
  json v = json::array();
  for (const auto& x : r.violations)
    v.push_back({{"kind", x.kind}, {"i", x.i}, {"u", x.u}, {"v", x.v}, {"j", x.j},
                 {"value", num(x.value)}, {"message", x.message}});
  return {{"ok", r.ok()}, {"violations", v}};
}

json to_json(const LyapunovReport& r) {
  json states = json::array();
  for (const auto& s : r.states)
    states.push_back({{"state", s.state}, {"worst_log_slack", num(s.worst_log_slack)},
                      {"worst_u", s.worst_u}, {"worst_v", s.worst_v}, {"pass", s.pass}});
  json out = {{"pass", r.pass},
              {"case", r.bounded_case ? "bounded" : "unbounded"},
              {"drift_pass", r.drift_pass},
              {"worst_log_slack", num(r.worst_log_slack)},
              {"worst_state", r.worst_state},
              {"cost_bound_pass", r.cost_bound_pass},
              {"states", states}};
  out["norm_like"] = r.norm_like ? norm_like_json(*r.norm_like) : json();
  return out;
}

json to_json(const IrreducibilityReport& r) {
  json out = {{"mode", r.mode == IrreducibilityMode::sufficient ? "sufficient" : "sampled"},
              {"pass", r.pass},
              {"guarantee", r.guarantee},
              {"samples", r.samples}};
  out["failing_p1"] = r.failing_p1 ? json(*r.failing_p1) : json();
  out["failing_p2"] = r.failing_p2 ? json(*r.failing_p2) : json();
  return out;
}

json to_json(const SolveReport& r) {
  json ladder = json::array();
  for (const auto& l : r.ladder)
    ladder.push_back({{"n", l.n}, {"domain_size", l.domain_size}, {"rho_n", num(l.rho)},
                      {"bracket_width", num(l.bracket_width)}, {"iterations", l.iterations},
                      {"damped_steps", l.damped_steps}});
  json psi = json::array();
  for (double x : r.log_psi_star) psi.push_back(x == kNegInf ? 0.0 : std::exp(x));
  json out = {
      {"rho_star", num(r.rho_star)},
      {"log_psi_star", nums(r.log_psi_star)},
      {"psi_star", psi},
      {"domain", r.domain},
      {"bracket", {num(r.bracket_lo), num(r.bracket_hi)}},
      {"residual", num(r.residual)},
      {"certified", r.certified},
      {"ladder_converged", r.ladder_converged},
      {"ladder", ladder},
      {"selectors",
       {{"p1", to_json(r.selectors.p1)},
        {"p2", to_json(r.selectors.p2)},
        {"gaps", nums(r.selectors.gaps)},
        {"max_gap", num(r.selectors.max_gap)},
        {"uncertified", r.selectors.uncertified}}},
      {"boundary_mass", num(r.boundary_mass)},
      {"diagnostics",
       {{"iterations", r.iterations}, {"damped_steps", r.damped_steps}, {"warnings", r.warnings}}},
      {"options",
       {{"ladder", r.options.ladder},
        {"tol_local", r.options.tol_local},
        {"tol_eig", r.options.tol_eig},
        {"tol_outer", r.options.tol_outer}}}};
  out["bound"] = r.bound ? json{{"k1", r.bound->k1}, {"k2", num(r.bound->k2)}, {"bound", num(r.bound->bound)}}
                         : json();
  return out;
}

json to_json(const EstimatorReport& r) {
  return {{"estimate", num(r.estimate)},
          {"spread", num(r.spread)},
          {"batches", r.batches},
          {"max_exponent", num(r.max_exponent)},
          {"min_exponent", num(r.min_exponent)},
          {"shift_applied", r.shift_applied},
          {"killed", r.killed},
          {"horizon", r.horizon},
          {"paths", r.paths},
          {"seed", r.seed},
          {"start", r.start}};
}

json to_json(const SaddleVerdict& r) {
  json devs = json::array();
  for (const auto& d : r.deviations)
    devs.push_back({{"player", d.player}, {"kind", d.kind}, {"pass", d.pass},
                    {"report", to_json(d.report)}, {"strategy", to_json(d.strategy)}});
  return {{"verdict", r.pass ? "PASS" : "FAIL"}, {"rho_star", num(r.rho_star)}, {"horizon_allowance", num(r.horizon_allowance)}, {"base_pass", r.base_pass},
          {"base", to_json(r.base)}, {"deviations", devs}};
}

json to_json(const RepresentationVerdict& r) {
  json states = json::array();
  for (const auto& s : r.states)
    states.push_back({{"start", s.start}, {"psi", num(s.psi)}, {"estimate", num(s.estimate)},
                      {"spread", num(s.spread)}, {"capped", s.capped}, {"killed", s.killed},
                      {"verdict", verdict_name(s.verdict)}});
  return {{"verdict", verdict_name(r.verdict)}, {"target", r.target}, {"states", states}};
}

json to_json(const Prop52Report& r) {
  json states = json::array();
  for (const auto& s : r.states)
    states.push_back({{"state", s.state}, {"log_lhs", num(s.log_lhs)}, {"log_rhs", num(s.log_rhs)},
                      {"log_slack", num(s.log_slack)}, {"pass", s.pass}, {"chain_pass", s.chain_pass}});
  return {{"pass", r.pass},
          {"drift_pass", r.drift_pass},
          {"chain_pass", r.chain_pass},
          {"p_hat_ok", r.p_hat_ok},
          {"worst_log_slack", num(r.worst_log_slack)},
          {"worst_state", r.worst_state},
          {"M", r.small_set},
          {"C", r.c_const},
          {"norm_like", norm_like_json(r.norm_like)},
          {"norm_like_note", "finite-window surrogate: eventual monotone growth only"},
          {"states", states}};
}

SolveReport solve_report_from_json(const json& doc) {
  try {
    SolveReport r;
    r.rho_star = doc.at("rho_star").get<double>();
    for (const auto& x : doc.at("log_psi_star")) r.log_psi_star.push_back(get_or_neg_inf(x));
    r.domain = doc.at("domain").get<std::vector<int>>();
    r.residual = doc.value("residual", json()).is_null() ? 0.0 : doc.at("residual").get<double>();
    r.certified = doc.value("certified", false);
    const json& sel = doc.at("selectors");
    r.selectors.p1 = StationaryStrategy(sel.at("p1").get<std::vector<std::vector<double>>>());
    r.selectors.p2 = StationaryStrategy(sel.at("p2").get<std::vector<std::vector<double>>>());
    return r;
  } catch (const json::exception& e) {
    throw IngestError(std::string("malformed solve report: ") + e.what());
  }
}

SolveReport load_solve_report(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IngestError("cannot open report file " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw IngestError("report file " + path + " is not valid JSON: " + e.what());
  }
  return solve_report_from_json(doc);
}

std::string ladder_csv(const SolveReport& r) {
  std::ostringstream os;
  os.precision(17);
  os << "n,domain_size,rho_n,bracket_width,iterations\n";
  for (const auto& l : r.ladder)
    os << l.n << ',' << l.domain_size << ',' << l.rho << ',' << l.bracket_width << ',' << l.iterations << '\n';
  return os.str();
}

}  // namespace rsgame
