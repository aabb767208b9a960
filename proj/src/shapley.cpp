#include "rsgame/shapley.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "rsgame/checks.hpp"
#include "rsgame/errors.hpp"
#include "rsgame/kernels.hpp"
#include "rsgame/localgame.hpp"
#include "rsgame/logmath.hpp"

namespace rsgame {
namespace {

double max_cost(const GameModel& model, int i) {
  double top = -std::numeric_limits<double>::infinity();
  for (int u = 0; u < model.num_p1(i); ++u)
    for (int v = 0; v < model.num_p2(i); ++v) top = std::max(top, model.cost(i, u, v));
  return top;
}

// Worst one-step mass that leaves the domain, out-of-window exit included.
double leaving_mass(const GameModel& model, const DirichletDomain& domain) {
  double worst = 0.0;
  for (int i : domain.states()) {
    for (int u = 0; u < model.num_p1(i); ++u) {
      for (int v = 0; v < model.num_p2(i); ++v) {
        double inside = 0.0;
        for (const auto& t : model.row(i, u, v))
          if (domain.contains(t.next)) inside += t.prob;
        worst = std::max(worst, 1.0 - inside);
      }
    }
  }
  return worst;
}

}  // namespace

LyapunovBound lyapunov_bound(const GameModel& model) {
  const auto& ly = model.lyapunov();
  if (!ly) throw MissingLyapunovData();
  LyapunovBound b;
  if (ly->bounded_case()) {
    b.bound = *ly->gamma;
    return b;
  }
  // C 1_K(i) + e^{-l(i)} W(i) <= e^{k1 - l(i)} W(i) for every i.
  const double log_c = std::log(ly->c_const);
  for (int k : ly->small_set)
    b.k1 = std::max(b.k1, std::log1p(std::exp(log_c + ly->ell[k] - ly->log_w[k])));
  b.k2 = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < model.num_states(); ++i) b.k2 = std::max(b.k2, max_cost(model, i) - ly->ell[i]);
  b.bound = b.k1 + b.k2;
  return b;
}

std::vector<int> default_ladder(const GameModel& model) {
  const int window = model.num_states();
  const int floor = model.i0() + 1;
  std::vector<int> sizes;
  for (int n = std::max(2, floor); n < window; n *= 2) sizes.push_back(n);
  sizes.push_back(window);
  return sizes;
}

double residual(const GameModel& model, double rho, std::span<const double> log_psi,
                const DirichletDomain& domain) {
  return shapley_residual(model, domain.states(), rho, log_psi);
}

Selectors extract_selectors_report(const GameModel& model, std::span<const double> log_psi,
                                   const DirichletDomain& domain, double tol, bool parallel) {
  const int n = model.num_states();
  std::vector<std::vector<double>> mu(n), nu(n);
  std::vector<double> gaps(n, 0.0);
  std::vector<char> fallback(n, 0);
  std::vector<std::string> errors(n);
  SaddleOptions opts;
  opts.tol = tol;

  auto solve_one = [&](int i) {
    try {
      const LocalGame game = make_local_game(model, i, log_psi);
      const LocalSaddle s = best_saddle(game, opts);
      if (s.value == kNegInf && !domain.contains(i)) {
        fallback[i] = 1;
      } else {
        mu[i] = s.mu;
        nu[i] = s.nu;
        gaps[i] = s.gap;
        return;
      }
    } catch (const Error& e) {
      errors[i] = e.what();
    }
    mu[i].assign(model.num_p1(i), 0.0);
    nu[i].assign(model.num_p2(i), 0.0);
    mu[i][0] = 1.0;
    nu[i][0] = 1.0;
    gaps[i] = domain.contains(i) ? std::numeric_limits<double>::infinity() : 0.0;
  };
  if (parallel) {
#pragma omp parallel for schedule(dynamic, 4)
    for (int i = 0; i < n; ++i) solve_one(i);
  } else {
    for (int i = 0; i < n; ++i) solve_one(i);
  }

  Selectors out;
  out.p1 = StationaryStrategy(std::move(mu));
  out.p2 = StationaryStrategy(std::move(nu));
  out.gaps = std::move(gaps);
  for (int i = 0; i < n; ++i) {
    if (!errors[i].empty()) out.warnings.push_back("state " + std::to_string(i) + ": " + errors[i]);
    if (fallback[i])
      out.warnings.push_back("state " + std::to_string(i) +
                             " sees psi = 0 everywhere; selectors default to action 0");
    if (domain.contains(i)) {
      out.max_gap = std::max(out.max_gap, out.gaps[i]);
      if (out.gaps[i] > tol) out.uncertified.push_back(i);
    }
  }
  return out;
}

std::pair<StationaryStrategy, StationaryStrategy> extract_selectors(const GameModel& model,
                                                                    std::span<const double> log_psi,
                                                                    const DirichletDomain& domain,
                                                                    double tol) {
  Selectors s = extract_selectors_report(model, log_psi, domain, tol);
  if (!s.uncertified.empty()) throw NoConvergence("extract_selectors", 0, s.max_gap);
  return {std::move(s.p1), std::move(s.p2)};
}

SolveReport solve_ergodic_game(const GameModel& model, const SolveOptions& options) {
  if (!(options.tol_local > 0.0) || !(options.tol_eig > 0.0) || !(options.tol_outer > 0.0))
    throw InvalidArgument("tolerances must be > 0");
  SolveReport report;
  report.options = options;
  std::vector<int> ladder = options.ladder.empty() ? default_ladder(model) : options.ladder;
  for (std::size_t k = 0; k < ladder.size(); ++k) {
    if (ladder[k] <= model.i0() || ladder[k] > model.num_states())
      throw InvalidArgument("ladder size " + std::to_string(ladder[k]) +
                            " must contain i0 and fit in the window");
    if (k > 0 && ladder[k] <= ladder[k - 1]) throw InvalidArgument("ladder must be increasing");
  }
  report.options.ladder = ladder;
  if (model.lyapunov()) report.bound = lyapunov_bound(model);

  EigenOptions eo;
  eo.tol = options.tol_eig;
  eo.max_iterations = options.max_iterations;
  eo.parallel = options.parallel;
  std::optional<EigenPair> prev;
  EigenPair cur;
  for (std::size_t k = 0; k < ladder.size(); ++k) {
    const DirichletDomain domain = DirichletDomain::prefix(model, ladder[k]);
    if (prev) eo.warm_start = prev->log_psi;
    try {
      cur = dirichlet_eigenpair(domain, eo);
    } catch (const CollapseToZero& e) {
      // An intermediate rung where i0 cannot reach the dominant class; the
      // next rung restarts from the last good eigenfunction.
      if (k + 1 == ladder.size()) throw;
      report.warnings.push_back("rung " + std::to_string(k + 1) + " skipped: " + e.what());
      continue;
    }
    report.ladder.push_back({static_cast<int>(k) + 1, domain.size(), cur.rho, cur.bracket_width(),
                             cur.iterations, cur.damped_steps});
    report.iterations += cur.iterations;
    report.damped_steps += cur.damped_steps;
    for (const auto& w : cur.warnings)
      report.warnings.push_back("rung " + std::to_string(k + 1) + ": " + w);

    if (prev) {
      double psi_diff = 0.0;
      for (int i : prev->domain) {
        const double a = prev->log_psi[i], b = cur.log_psi[i];
        if (std::isfinite(a) || std::isfinite(b))
          psi_diff = std::max(psi_diff, std::isfinite(a) && std::isfinite(b)
                                            ? std::abs(a - b)
                                            : std::numeric_limits<double>::infinity());
      }
      if (std::abs(cur.rho - prev->rho) <= options.tol_outer && psi_diff <= options.tol_outer) {
        report.ladder_converged = true;
        break;
      }
    }
    prev = cur;
  }

  const DirichletDomain final_domain(model, cur.domain);
  const bool whole_closed_window =
      final_domain.size() == model.num_states() && model.max_exit_mass() <= kRowSumTol;
  if (!report.ladder_converged && whole_closed_window) report.ladder_converged = true;
  if (!report.ladder_converged)
    report.warnings.push_back("LadderExhausted: outer criterion unmet at the window edge");

  report.rho_star = cur.rho;
  report.bracket_lo = cur.bracket_lo;
  report.bracket_hi = cur.bracket_hi;
  report.domain = cur.domain;
  report.log_psi_star = cur.log_psi;
  report.residual = residual(model, cur.rho, cur.log_psi, final_domain);
  report.boundary_mass = leaving_mass(model, final_domain);
  if (!whole_closed_window && report.boundary_mass >= 1e-6)
    report.warnings.push_back("truncation suspect: final domain leaks " +
                              std::to_string(report.boundary_mass) + " of one-step mass");
  if (report.rho_star < -options.tol_eig)
    report.warnings.push_back("final rho is below -tol");

  report.selectors = extract_selectors_report(model, cur.log_psi, final_domain, options.tol_local,
                                              options.parallel);
  for (const auto& w : report.selectors.warnings) report.warnings.push_back("selectors: " + w);
  if (!report.selectors.uncertified.empty())
    report.warnings.push_back("selectors: " + std::to_string(report.selectors.uncertified.size()) +
                              " states have no saddle point within tol (max gap " +
                              std::to_string(report.selectors.max_gap) + ")");

  report.certified = report.ladder_converged && report.selectors.uncertified.empty() &&
                     report.residual <= options.tol_eig && report.rho_star >= -options.tol_eig;
  return report;
}

double uncontrolled_eigen_oracle(const GameModel& model) {
  if (!model.uncontrolled()) throw NotUncontrolled();
  const int n = model.num_states();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    const double scale = std::exp(model.cost(i, 0, 0));
    for (const auto& t : model.row(i, 0, 0)) m(i, t.next) += scale * t.prob;
  }
  const Eigen::VectorXcd ev = m.eigenvalues();
  double radius = 0.0;
  for (int k = 0; k < n; ++k) radius = std::max(radius, std::abs(ev[k]));
  return std::log(radius);
}

}  // namespace rsgame
