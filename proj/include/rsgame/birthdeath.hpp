#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rsgame/checks.hpp"
#include "rsgame/model.hpp"

namespace rsgame {

/// Per-action cost term c(i, a) = action_coef * a + state_coef * i + offset,
/// or table[i][k] for the k-th grid action (the last row repeats past the end).
struct CostShape {
  double action_coef = 1.0;
  double state_coef = 0.0;
  double offset = 0.0;
  std::vector<std::vector<double>> table;

  double operator()(int i, int k, double a) const;
};

struct BirthDeathParams {
  double p_hat = 0.1;
  double delta = 0.1;
  double L1 = 1.0;
  double L2 = 1.0;
  int grid_u = 5;
  int grid_v = 5;
  int window = 60;
  CostShape c1;  // player-1 term, added
  CostShape c2;  // player-2 term, subtracted
  // Adds max(0, -min c) to every cost so the model stays nonnegative; the
  // shift moves rho by the same constant and leaves psi and selectors alone.
  bool lift_costs = true;
  bool allow_p_hat = false;  // accept p_hat >= 1/6
  double theta = 1.0;
};

struct BirthDeathLog {
  double fold_mass = 0.0;      // state-0 tail beyond the window, folded into 0
  double edge_fold_mass = 0.0;  // largest up-move from the last state, folded into 0
  double cost_lift = 0.0;
  double min_raw_cost = 0.0;
  std::vector<std::string> notes;
};

std::vector<double> action_grid(double delta, double top, int points);

/// Lyapunov pieces of the example: log W(i) = i^2/6 + 1, l(i) = (i+3)/6,
/// M = {i : 4 - l(i) > 0} and the constant C.
double bd_log_w(int i);
double bd_ell(int i);
std::vector<int> bd_small_set();
double bd_c_const();

/// Window-truncated controlled birth-death game with i0 = 0 and the drift
/// data attached. Throws WindowTooSmall for window < 4 and InvalidArgument for
/// bad parameters.
GameModel build_birth_death(const BirthDeathParams& params, BirthDeathLog* log = nullptr);

struct Prop52State {
  int state = 0;
  double log_lhs = 0.0;  // worst log sum_j W(j) P(j|i,u,v) over the grid
  double log_rhs = 0.0;  // log(C 1_M(i) + e^{-l(i)} W(i))
  double log_slack = 0.0;
  bool pass = false;
  // i >= 2: the intermediate bound 4 W(i) e^{-i/3 + 1/6}.
  bool chain_pass = true;
};

struct Prop52Report {
  bool pass = false;
  bool drift_pass = true;
  bool chain_pass = true;
  bool p_hat_ok = true;
  double worst_log_slack = 0.0;
  int worst_state = -1;
  std::vector<int> small_set;
  double c_const = 0.0;
  NormLikeResult norm_like;
  std::vector<Prop52State> states;
};

/// Drift inequality and norm-like surrogate for i = 0..i_max on the untruncated
/// kernels (the state-0 series is summed until its terms vanish), so i_max is
/// not limited by the window.
Prop52Report verify_prop_5_2(const BirthDeathParams& params, int i_max);

}  // namespace rsgame
