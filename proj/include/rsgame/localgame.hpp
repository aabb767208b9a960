#pragma once

#include <span>
#include <utility>
#include <vector>

#include "rsgame/model.hpp"

namespace rsgame {

/// The one-state game behind the Shapley operator, reduced to two |U| x |V|
/// tables: cost C(u,v) and log A(u,v) = log sum_j psi(j) P(j|i,u,v). With
/// mixed strategies the log-payoff is
///
///   log F(mu, nu) = mu^T C nu + log(mu^T A nu).
///
/// Both terms are bilinear inside, and log F is concave in mu for fixed nu and
/// concave in nu for fixed mu.
struct LocalGame {
  int rows = 0;  // |U(i)|
  int cols = 0;  // |V(i)|
  std::vector<double> cost;      // row-major rows x cols
  std::vector<double> log_mass;  // row-major, -inf where sum_j psi P = 0

  double c(int u, int v) const { return cost[static_cast<std::size_t>(u) * cols + v]; }
  double log_a(int u, int v) const { return log_mass[static_cast<std::size_t>(u) * cols + v]; }
};

LocalGame make_local_game(const GameModel& model, int state, std::span<const double> log_psi);

/// log F(mu, nu) for the reduced game.
double payoff(const LocalGame& game, std::span<const double> mu, std::span<const double> nu);

struct LocalSaddle {
  double value = 0.0;  // log-domain lower value
  std::vector<double> mu;
  std::vector<double> nu;
  double gap = 0.0;  // certified upper bound on sup_nu log F(mu,.) - min_u log F(u, nu)
  long iterations = 0;
};

struct SaddleOptions {
  double tol = 1e-8;
  long max_iterations = 10000;
};

/// Result of the concave max-min  sup_nu min_u log F(u, nu).
struct LowerValue {
  double value = 0.0;         // min_u log F(u, nu) at the returned nu
  double accuracy = 0.0;      // lower value <= value + accuracy
  std::vector<double> nu;
  std::vector<double> multipliers;  // KKT weights on the rows, sum to 1
  long newton_steps = 0;
};

/// Solves the lower problem by a primal log-barrier method on
///   max t  s.t.  C_u nu + log(A_u nu) >= t,  nu in the simplex.
/// Throws NoConvergence if `budget` Newton steps do not reach `accuracy`.
LowerValue solve_lower(const LocalGame& game, double accuracy = 1e-12, long budget = 10000);

/// c(i,mu,nu) + log sum_j psi(j) P(j|i,mu,nu); -inf flags an empty support.
double local_payoff(const GameModel& model, int state, std::span<const double> log_psi,
                    std::span<const double> mu, std::span<const double> nu);

/// Best pure reply of the minimizer to nu; ties go to the lowest index.
std::pair<int, double> best_response_pure_min(const GameModel& model, int state,
                                              std::span<const double> log_psi,
                                              std::span<const double> nu);

/// Saddle problem of the Shapley operator at one state with a certified
/// duality gap. Throws NoConvergence when the gap stays above tol, which also
/// happens when the game has no saddle point in mixed strategies.
LocalSaddle solve_saddle(const GameModel& model, int state, std::span<const double> log_psi,
                         const SaddleOptions& options = {});
LocalSaddle solve_saddle(const LocalGame& game, const SaddleOptions& options = {});

/// Same search as solve_saddle but returns the best certified pair found
/// instead of throwing; gap may exceed options.tol.
LocalSaddle best_saddle(const LocalGame& game, const SaddleOptions& options = {});

/// Operator value sup_nu inf_mu log F at one state, without certifying mu.
double shapley_value(const GameModel& model, int state, std::span<const double> log_psi);

}  // namespace rsgame
