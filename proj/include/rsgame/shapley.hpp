#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rsgame/dirichlet.hpp"
#include "rsgame/model.hpp"

namespace rsgame {

struct LadderRung {
  int n = 0;            // rung index, from 1
  int domain_size = 0;
  double rho = 0.0;
  double bracket_width = 0.0;
  long iterations = 0;
  long damped_steps = 0;
};

/// Upper bound on the ergodic cost from the drift data: k1 + k2 in the
/// unbounded-cost case, gamma in the bounded one.
struct LyapunovBound {
  double k1 = 0.0;
  double k2 = 0.0;
  double bound = 0.0;
};

LyapunovBound lyapunov_bound(const GameModel& model);

struct SolveOptions {
  std::vector<int> ladder;  // domain sizes; empty means doubling from 2 up to the window
  double tol_local = 1e-8;
  double tol_eig = 1e-8;
  double tol_outer = 1e-6;
  long max_iterations = 100000;
  bool parallel = true;
};

struct Selectors {
  StationaryStrategy p1;
  StationaryStrategy p2;
  std::vector<double> gaps;  // certified local duality gap per window state
  double max_gap = 0.0;
  std::vector<int> uncertified;  // states whose gap exceeds tol
  std::vector<std::string> warnings;
};

struct SolveReport {
  std::vector<LadderRung> ladder;
  double rho_star = 0.0;
  std::vector<double> log_psi_star;
  std::vector<int> domain;
  double bracket_lo = 0.0, bracket_hi = 0.0;
  Selectors selectors;
  double residual = 0.0;
  std::optional<LyapunovBound> bound;
  double boundary_mass = 0.0;  // one-step mass leaving the final domain, worst pair
  bool ladder_converged = false;
  bool certified = false;
  long iterations = 0;
  long damped_steps = 0;
  std::vector<std::string> warnings;
  SolveOptions options;
};

std::vector<int> default_ladder(const GameModel& model);

/// Truncation ladder: Dirichlet eigenpairs on D_1 subset D_2 subset ...,
/// each warm-started from the previous rung. Stops when consecutive rungs agree
/// in rho and, on the smaller domain, in log psi, both within tol_outer. A run
/// that ends on the whole window of a closed model is exact and also counts as
/// converged. Otherwise the report is flagged LadderExhausted and not certified.
SolveReport solve_ergodic_game(const GameModel& model, const SolveOptions& options = {});

/// max_{i in D} |log G psi(i) - rho - log psi(i)|.
double residual(const GameModel& model, double rho, std::span<const double> log_psi,
                const DirichletDomain& domain);

/// Per-state saddle strategies of the Shapley operator at psi. States outside
/// the domain get the saddle of the same local game when it is finite and a
/// point mass on action 0 otherwise. Never throws on a wide gap; see
/// Selectors::uncertified.
Selectors extract_selectors_report(const GameModel& model, std::span<const double> log_psi,
                                   const DirichletDomain& domain, double tol, bool parallel = true);

/// Throws NoConvergence when some state on the domain has gap > tol.
std::pair<StationaryStrategy, StationaryStrategy> extract_selectors(const GameModel& model,
                                                                    std::span<const double> log_psi,
                                                                    const DirichletDomain& domain,
                                                                    double tol);

/// log spectral radius of M(i,j) = e^{c(i)} P(j|i) for a model with singleton
/// action sets. Throws NotUncontrolled otherwise.
double uncontrolled_eigen_oracle(const GameModel& model);

}  // namespace rsgame
