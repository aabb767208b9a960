#include "rsgame/dirichlet.hpp"

#include <algorithm>
#include <cmath>

#include "rsgame/errors.hpp"
#include "rsgame/kernels.hpp"
#include "rsgame/localgame.hpp"
#include "rsgame/logmath.hpp"

namespace rsgame {
namespace {

// log(max psi / psi(i0)) beyond which i0 counts as unreachable from the
// dominant part of the domain.
constexpr double kCollapseLog = 5000.0;

}  // namespace

DirichletDomain::DirichletDomain(const GameModel& model, std::vector<int> states)
    : model_(&model), states_(std::move(states)) {
  std::sort(states_.begin(), states_.end());
  states_.erase(std::unique(states_.begin(), states_.end()), states_.end());
  if (states_.empty()) throw InvalidArgument("Dirichlet domain is empty");
  mask_.assign(model.num_states(), 0);
  for (int i : states_) {
    if (i < 0 || i >= model.num_states())
      throw InvalidArgument("Dirichlet domain state " + std::to_string(i) + " is outside the window");
    mask_[i] = 1;
  }
  if (!contains(model.i0())) throw InvalidArgument("Dirichlet domain does not contain i0");
  i0_pos_ = static_cast<int>(std::lower_bound(states_.begin(), states_.end(), model.i0()) - states_.begin());
}

DirichletDomain DirichletDomain::prefix(const GameModel& model, int n) {
  if (n < 1 || n > model.num_states())
    throw InvalidArgument("domain size " + std::to_string(n) + " outside [1, window]");
  std::vector<int> s(n);
  for (int i = 0; i < n; ++i) s[i] = i;
  return DirichletDomain(model, std::move(s));
}

nlohmann::json eigenpair_to_json(const EigenPair& pair) {
  nlohmann::json psi = nlohmann::json::array(), log_psi = nlohmann::json::array();
  for (double x : pair.log_psi) {
    psi.push_back(x == kNegInf ? 0.0 : std::exp(x));
    // JSON has no -inf; null marks states off the domain.
    log_psi.push_back(std::isfinite(x) ? nlohmann::json(x) : nlohmann::json());
  }
  return {{"rho", pair.rho}, {"psi", psi}, {"log_psi", log_psi}, {"domain", pair.domain}};
}

EigenPair eigenpair_from_json(const nlohmann::json& doc) {
  EigenPair p;
  p.rho = doc.at("rho").get<double>();
  for (const auto& x : doc.at("log_psi")) p.log_psi.push_back(x.is_null() ? kNegInf : x.get<double>());
  p.domain = doc.at("domain").get<std::vector<int>>();
  return p;
}

EigenPair dirichlet_eigenpair(const DirichletDomain& domain, const EigenOptions& options) {
  if (!(options.tol > 0.0)) throw InvalidArgument("dirichlet_eigenpair: tol must be > 0");
  const GameModel& model = domain.model();
  const auto states = domain.states();
  const int n = domain.size();
  const int i0 = domain.i0_position();

  std::vector<double> log_psi(model.num_states(), kNegInf);
  for (int i : states) {
    const bool warm = !options.warm_start.empty() && std::isfinite(options.warm_start[i]);
    log_psi[i] = warm ? options.warm_start[i] : 0.0;
  }
  const double shift = log_psi[states[i0]];
  for (int i : states) log_psi[i] -= shift;

  EigenPair out;
  out.domain.assign(states.begin(), states.end());
  std::vector<double> log_g(n), next(model.num_states(), kNegInf);
  std::vector<char> dropped(n, 0);
  double width = std::numeric_limits<double>::infinity();

  for (long k = 0; k < options.max_iterations; ++k) {
    if (options.parallel)
      apply_shapley(model, states, log_psi, log_g);
    else
      apply_shapley_serial(model, states, log_psi, log_g);
    if (log_g[i0] == kNegInf) throw CollapseToZero(k);

    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (int p = 0; p < n; ++p) {
      if (log_psi[states[p]] == kNegInf) continue;
      const double r = log_g[p] - log_psi[states[p]];
      lo = std::min(lo, r);
      hi = std::max(hi, r);
    }
    out.iterations = k + 1;
    width = hi - lo;
    if (width <= options.tol) {
      out.rho = 0.5 * (lo + hi);
      out.bracket_lo = lo;
      out.bracket_hi = hi;
      out.log_psi = std::move(log_psi);
      for (int p = 0; p < n; ++p)
        if (dropped[p])
          out.warnings.push_back("state " + std::to_string(states[p]) +
                                 " cannot reach the domain support; psi = 0 there");
      if (out.rho < -options.tol)
        out.warnings.push_back("rho_n = " + std::to_string(out.rho) + " is below -tol");
      return out;
    }

    const bool damp = k >= options.damping_after;
    if (damp) ++out.damped_steps;
    for (int p = 0; p < n; ++p) {
      const int i = states[p];
      double x = log_g[p] - log_g[i0];
      if (x == kNegInf) dropped[p] = 1;
      if (damp && x != kNegInf && log_psi[i] != kNegInf) x = 0.5 * (x + log_psi[i]);
      next[i] = x;
    }
    double top = kNegInf;
    for (int i : states) {
      log_psi[i] = next[i];
      top = std::max(top, next[i]);
    }
    // psi(i0) vanishing relative to the rest of the domain.
    if (top > kCollapseLog) throw CollapseToZero(k);
  }
  throw NoConvergence("dirichlet_eigenpair", options.max_iterations, width);
}

std::vector<double> solve_source_problem(const DirichletDomain& domain, std::span<const double> cbar,
                                         std::span<const double> g, double tol,
                                         long max_iterations) {
  const GameModel& model = domain.model();
  if (cbar.size() != model.num_pairs())
    throw InvalidArgument("solve_source_problem: cbar needs one entry per action pair");
  if (static_cast<int>(g.size()) != model.num_states())
    throw InvalidArgument("solve_source_problem: g needs one entry per window state");
  double top = -std::numeric_limits<double>::infinity();
  for (int i : domain.states()) {
    if (!(g[i] >= 0.0)) throw InvalidArgument("solve_source_problem: g must be >= 0 on the domain");
    for (int u = 0; u < model.num_p1(i); ++u)
      for (int v = 0; v < model.num_p2(i); ++v) top = std::max(top, cbar[model.pair_index(i, u, v)]);
  }
  if (!(top < 0.0)) throw NotStrictlyNegative(top);
  const double alpha = std::exp(top);
  const double stop = tol * (1.0 - alpha) / alpha;

  std::vector<double> phi(model.num_states(), 0.0), log_phi(model.num_states(), kNegInf);
  std::vector<double> next(model.num_states(), 0.0);
  double step = std::numeric_limits<double>::infinity();
  for (long k = 0; k < max_iterations; ++k) {
    step = 0.0;
    for (int i : domain.states()) {
      LocalGame game = make_local_game(model, i, log_phi);
      for (int u = 0; u < game.rows; ++u)
        for (int v = 0; v < game.cols; ++v)
          game.cost[static_cast<std::size_t>(u) * game.cols + v] = cbar[model.pair_index(i, u, v)];
      const double val = solve_lower(game).value;
      next[i] = (val == kNegInf ? 0.0 : std::exp(val)) + g[i];
      step = std::max(step, std::abs(next[i] - phi[i]));
    }
    for (int i : domain.states()) {
      phi[i] = next[i];
      log_phi[i] = safe_log(phi[i]);
    }
    if (step <= stop) return phi;
  }
  throw NoConvergence("solve_source_problem", max_iterations, step);
}

}  // namespace rsgame
