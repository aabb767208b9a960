#include "rsgame/birthdeath.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rsgame/errors.hpp"
#include "rsgame/logmath.hpp"

namespace rsgame {
namespace {

void check_params(const BirthDeathParams& p) {
  if (p.window < 4) throw WindowTooSmall(p.window);
  if (!(p.delta > 0.0)) throw InvalidArgument("delta must be > 0");
  if (!(p.delta <= p.L1) || !(p.delta <= p.L2)) throw InvalidArgument("need delta <= L1 and delta <= L2");
  if (p.grid_u < 1 || p.grid_v < 1) throw InvalidArgument("action grids need at least one point");
  if (!(p.p_hat >= 0.0)) throw InvalidArgument("p_hat must be >= 0");
  if (!(p.p_hat < 1.0 / 6.0) && !p.allow_p_hat)
    throw InvalidArgument("p_hat must be < 1/6 (pass allow_p_hat to override)");
}

std::string label(double a) {
  std::ostringstream os;
  os.precision(17);
  os << a;
  return os.str();
}

// Untruncated kernel row for i >= 1 with masses in both linear and log form.
std::vector<Transition> row_above_zero(int i, double u, double v, double two_l) {
  const double lt = std::log(two_l);
  if (i == 1) {
    const double lm = -2.0 + std::log(v) - lt;
    const double m = std::exp(lm);
    return {{0, 1.0 - 3.0 * m, std::log1p(-3.0 * m)}, {1, m, lm}, {2, m, lm}, {3, m, lm}};
  }
  const double ld = std::log(u) - i - lt;
  const double lu = std::log(v) - 2.0 * i - lt;
  const double down = std::exp(ld), up = std::exp(lu);
  return {{0, 1.0 - 2.0 * (down + up), std::log1p(-2.0 * (down + up))},
          {i - 1, down, ld},
          {i, down + up, log_add_exp(ld, lu)},
          {i + 1, up, lu}};
}

double raw_cost(const BirthDeathParams& p, int i, int ku, double u, int kv, double v) {
  return p.p_hat * i + p.c1(i, ku, u) - p.c2(i, kv, v);
}

}  // namespace

double CostShape::operator()(int i, int k, double a) const {
  if (!table.empty()) {
    const auto& row = table[std::min<std::size_t>(i, table.size() - 1)];
    return row.at(k);
  }
  return action_coef * a + state_coef * i + offset;
}

std::vector<double> action_grid(double delta, double top, int points) {
  std::vector<double> g(points);
  for (int k = 0; k < points; ++k)
    g[k] = points == 1 ? delta : delta + (top - delta) * k / (points - 1);
  return g;
}

double bd_log_w(int i) { return static_cast<double>(i) * i / 6.0 + 1.0; }
double bd_ell(int i) { return (i + 3) / 6.0; }

std::vector<int> bd_small_set() {
  std::vector<int> m;
  for (int i = 0; 4.0 - bd_ell(i) > 0.0; ++i) m.push_back(i);
  return m;
}

double bd_c_const() {
  double top = kNegInf;
  for (int j : bd_small_set()) top = std::max(top, bd_log_w(j) + 4.0);
  double series = 0.0;
  for (int i = 1;; ++i) {
    const double term = std::exp(-i * i / 6.0) - std::exp(-i * i / 3.0);
    series += term;
    if (term < 1e-300) break;
  }
  return std::max(std::exp(top), std::exp(-2.0) * series + std::exp(1.0));
}

GameModel build_birth_death(const BirthDeathParams& p, BirthDeathLog* log) {
  check_params(p);
  const int n = p.window;
  const auto us = action_grid(p.delta, p.L1, p.grid_u);
  const auto vs = action_grid(p.delta, p.L2, p.grid_v);
  std::vector<std::string> ul, vl;
  for (double u : us) ul.push_back(label(u));
  for (double v : vs) vl.push_back(label(v));
  const double two_l = 2.0 * (p.L1 + p.L2);

  BirthDeathLog local;
  BirthDeathLog& lg = log ? *log : local;
  lg = BirthDeathLog{};
  lg.min_raw_cost = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i)
    for (int ku = 0; ku < p.grid_u; ++ku)
      for (int kv = 0; kv < p.grid_v; ++kv)
        lg.min_raw_cost = std::min(lg.min_raw_cost, raw_cost(p, i, ku, us[ku], kv, vs[kv]));
  lg.cost_lift = p.lift_costs ? std::max(0.0, -lg.min_raw_cost) : 0.0;
  if (lg.min_raw_cost < 0.0) {
    lg.notes.push_back("raw cost p_hat*i + c1 - c2 reaches " + label(lg.min_raw_cost) +
                       (p.lift_costs ? "; every cost lifted by " + label(lg.cost_lift)
                                     : "; model has negative costs"));
  }

  GameModel::Builder b(n);
  for (int i = 0; i < n; ++i) b.set_actions(i, ul, vl);

  // State 0: e^{-j^2/3-3} to every j >= 1; the rest, including the tail beyond
  // the window, stays at 0.
  double to_others = 0.0;
  for (int j = 1; j < n; ++j) to_others += std::exp(-j * j / 3.0 - 3.0);
  for (int j = n;; ++j) {
    const double t = std::exp(-static_cast<double>(j) * j / 3.0 - 3.0);
    lg.fold_mass += t;
    if (t < 1e-300 || t < lg.fold_mass * 1e-17) break;
  }
  for (int ku = 0; ku < p.grid_u; ++ku) {
    for (int kv = 0; kv < p.grid_v; ++kv) {
      b.add_transition(0, ku, kv, 0, 1.0 - to_others);
      for (int j = 1; j < n; ++j) b.add_transition_log(0, ku, kv, j, -j * j / 3.0 - 3.0);
    }
  }
  for (int i = 1; i < n; ++i) {
    for (int ku = 0; ku < p.grid_u; ++ku) {
      for (int kv = 0; kv < p.grid_v; ++kv) {
        for (const auto& t : row_above_zero(i, us[ku], vs[kv], two_l)) {
          if (t.log_prob == kNegInf) continue;
          if (t.next >= n) {
            // Up-move past the last state: folded into 0 like the state-0 tail.
            lg.edge_fold_mass = std::max(lg.edge_fold_mass, t.prob);
            b.add_transition_log(i, ku, kv, 0, t.log_prob);
          } else {
            b.add_transition_log(i, ku, kv, t.next, t.log_prob);
          }
        }
      }
    }
  }
  for (int i = 0; i < n; ++i)
    for (int ku = 0; ku < p.grid_u; ++ku)
      for (int kv = 0; kv < p.grid_v; ++kv)
        b.set_cost(i, ku, kv, raw_cost(p, i, ku, us[ku], kv, vs[kv]) + lg.cost_lift);
  if (lg.fold_mass > 0.0)
    lg.notes.push_back("state-0 tail beyond the window folded into state 0: " + label(lg.fold_mass));
  if (lg.edge_fold_mass > 0.0)
    lg.notes.push_back("largest up-move from the last state folded into state 0: " +
                       label(lg.edge_fold_mass));

  b.set_theta(p.theta);
  b.set_i0(0);
  b.set_closed(true);
  LyapunovData ly;
  for (int i = 0; i < n; ++i) {
    ly.log_w.push_back(bd_log_w(i));
    ly.ell.push_back(bd_ell(i));
  }
  for (int k : bd_small_set())
    if (k < n) ly.small_set.push_back(k);
  ly.c_const = bd_c_const();
  b.set_lyapunov(std::move(ly));
  GameModel model = std::move(b).build();

  for (int i = 0; i < n; ++i)
    for (int u = 0; u < model.num_p1(i); ++u)
      for (int v = 0; v < model.num_p2(i); ++v)
        if (std::abs(model.exit_mass(i, u, v)) > kRowSumTol)
          throw std::logic_error("birth-death row (" + std::to_string(i) + "," + std::to_string(u) +
                                 "," + std::to_string(v) + ") does not sum to 1");
  return model;
}

Prop52Report verify_prop_5_2(const BirthDeathParams& p, int i_max) {
  check_params(p);
  if (i_max < 0) throw InvalidArgument("i_max must be >= 0");
  const auto us = action_grid(p.delta, p.L1, p.grid_u);
  const auto vs = action_grid(p.delta, p.L2, p.grid_v);
  const double two_l = 2.0 * (p.L1 + p.L2);
  Prop52Report r;
  r.small_set = bd_small_set();
  r.c_const = bd_c_const();
  r.p_hat_ok = p.p_hat < 1.0 / 6.0;
  const double log_c = std::log(r.c_const);
  const auto in_m = [&](int i) { return i < static_cast<int>(r.small_set.size()); };

  // State 0 does not depend on the actions: e P(0|0) + sum_{j>=1} e^{-j^2/6-2}.
  double tail = 0.0, series = 0.0;
  for (int j = 1;; ++j) {
    const double pj = std::exp(-j * j / 3.0 - 3.0);
    const double wj = std::exp(-j * j / 6.0 - 2.0);
    tail += pj;
    series += wj;
    if (wj < 1e-300) break;
  }
  const double lhs0 = std::log(std::exp(1.0) * (1.0 - tail) + series);

  std::vector<double> gap(i_max + 1);
  std::vector<double> terms;
  for (int i = 0; i <= i_max; ++i) {
    Prop52State s;
    s.state = i;
    s.log_rhs = log_add_exp(in_m(i) ? log_c : kNegInf, bd_log_w(i) - bd_ell(i));
    s.log_lhs = kNegInf;
    double top_cost = -std::numeric_limits<double>::infinity();
    for (int ku = 0; ku < p.grid_u; ++ku) {
      for (int kv = 0; kv < p.grid_v; ++kv) {
        top_cost = std::max(top_cost, raw_cost(p, i, ku, us[ku], kv, vs[kv]));
        double lhs = lhs0;
        if (i > 0) {
          terms.clear();
          for (const auto& t : row_above_zero(i, us[ku], vs[kv], two_l))
            terms.push_back(bd_log_w(t.next) + t.log_prob);
          lhs = log_sum_exp(terms);
        }
        s.log_lhs = std::max(s.log_lhs, lhs);
        if (i >= 2 && lhs > std::log(4.0) + bd_log_w(i) - i / 3.0 + 1.0 / 6.0 + 1e-14)
          s.chain_pass = false;
      }
    }
    s.log_slack = s.log_rhs - s.log_lhs;
    s.pass = s.log_slack >= -kLyapunovSlackTol;
    r.drift_pass = r.drift_pass && s.pass;
    r.chain_pass = r.chain_pass && s.chain_pass;
    if (r.worst_state < 0 || s.log_slack < r.worst_log_slack) {
      r.worst_log_slack = s.log_slack;
      r.worst_state = i;
    }
    // The lift is a constant and does not change the shape of l - max c.
    gap[i] = bd_ell(i) - p.theta * top_cost;
    r.states.push_back(s);
  }
  r.norm_like = check_norm_like(gap);
  r.pass = r.drift_pass && r.chain_pass && r.norm_like.pass && r.p_hat_ok;
  return r;
}

}  // namespace rsgame
