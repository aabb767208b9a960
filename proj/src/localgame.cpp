#include "rsgame/localgame.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <optional>

#include "rsgame/errors.hpp"
#include "rsgame/logmath.hpp"

namespace rsgame {
namespace {

constexpr double kBarrierGrowth = 20.0;
constexpr double kCenteringTol = 1e-12;  // Newton decrement^2 / 2, barrier units
constexpr double kSnapThreshold = 1e-10;
constexpr double kActiveCuts[] = {1e-10, 1e-7, 1e-5, 1e-3};
constexpr double kActiveTol = 1e-8;  // relative, pieces counted as active
constexpr int kCenteringSteps = 60;
constexpr int kPolishSteps = 4;  // per barrier weight; Newton is quadratic near the center

// Concave pieces g_u(nu) = shift_u + C_u nu + log(a_u nu) with a_u >= 0 and
// max_v a_u(v) = 1, so no row underflows as a whole.
class MaxMinProblem {
 public:
  explicit MaxMinProblem(const LocalGame& game) : m_(game.rows), d_(game.cols) {
    shift_.resize(m_);
    a_.resize(static_cast<std::size_t>(m_) * d_);
    for (int u = 0; u < m_; ++u) {
      double top = kNegInf;
      for (int v = 0; v < d_; ++v) top = std::max(top, game.log_a(u, v));
      shift_[u] = top;
      for (int v = 0; v < d_; ++v)
        a_[idx(u, v)] = top == kNegInf ? 0.0 : std::exp(game.log_a(u, v) - top);
    }
    c_ = game.cost;
  }

  int rows() const { return m_; }
  int cols() const { return d_; }
  double shift(int u) const { return shift_[u]; }

  // Fills g and a_u.nu; false when some a_u.nu <= 0.
  bool evaluate(std::span<const double> nu, std::span<double> g, std::span<double> dot) const {
    for (int u = 0; u < m_; ++u) {
      double lin = 0.0, mass = 0.0;
      for (int v = 0; v < d_; ++v) {
        lin += c_[idx(u, v)] * nu[v];
        mass += a_[idx(u, v)] * nu[v];
      }
      if (!(mass > 0.0)) return false;
      dot[u] = mass;
      g[u] = shift_[u] + lin + std::log(mass);
    }
    return true;
  }

  double min_piece(std::span<const double> nu) const {
    double best = std::numeric_limits<double>::infinity();
    for (int u = 0; u < m_; ++u) {
      double lin = 0.0, mass = 0.0;
      for (int v = 0; v < d_; ++v) {
        lin += c_[idx(u, v)] * nu[v];
        mass += a_[idx(u, v)] * nu[v];
      }
      best = std::min(best, mass > 0.0 ? shift_[u] + lin + std::log(mass) : kNegInf);
    }
    return best;
  }

  double c(int u, int v) const { return c_[idx(u, v)]; }
  double a(int u, int v) const { return a_[idx(u, v)]; }

 private:
  std::size_t idx(int u, int v) const { return static_cast<std::size_t>(u) * d_ + v; }
  int m_, d_;
  std::vector<double> shift_, a_, c_;
};

// A pure pair (u, v) with u a best reply to v. The maximizer's sup over nu
// against u is a concave problem whose Frank-Wolfe gap at the vertex v bounds
// how far it can rise above the pure value, so the returned gap certifies the
// pair. Returns the first v (lowest index) whose gap is at most tol.
struct PureSaddle {
  int u = 0, v = 0;
  double value = 0.0, gap = 0.0;
};

std::optional<PureSaddle> pure_saddle(const LocalGame& game, double tol) {
  for (int v = 0; v < game.cols; ++v) {
    int best = 0;
    double best_val = std::numeric_limits<double>::infinity();
    for (int u = 0; u < game.rows; ++u) {
      const double val = game.c(u, v) + game.log_a(u, v);
      if (val < best_val) {
        best_val = val;
        best = u;
      }
    }
    if (best_val == kNegInf) continue;
    double fw = 0.0;
    const double base = game.c(best, v) + 1.0;
    for (int w = 0; w < game.cols; ++w) {
      if (w == v) continue;
      const double la = game.log_a(best, w);
      const double grad = game.c(best, w) + (la == kNegInf ? 0.0 : std::exp(la - game.log_a(best, v)));
      fw = std::max(fw, grad - base);
    }
    if (fw <= tol) return PureSaddle{best, v, best_val, fw};
  }
  return std::nullopt;
}

LowerValue pure_column(const LocalGame& game) {
  LowerValue out;
  out.nu = {1.0};
  out.multipliers.assign(game.rows, 0.0);
  int best = 0;
  double best_val = std::numeric_limits<double>::infinity();
  for (int u = 0; u < game.rows; ++u) {
    const double val = game.c(u, 0) + game.log_a(u, 0);
    if (val < best_val) {
      best_val = val;
      best = u;
    }
  }
  out.value = best_val;
  out.multipliers[best] = 1.0;
  return out;
}

// Upper bound on the lower value from weights w on the simplex: the optimum
// is at most max_nu sum_u w_u g_u(nu), and that concave maximum is at most its
// value at nu plus the Frank-Wolfe gap there. +inf when nu has an empty row.
double lagrangian_bound(const MaxMinProblem& prob, std::span<const double> nu, std::span<const double> w) {
  const int m = prob.rows(), d = prob.cols();
  std::vector<double> g(m), dot(m);
  if (!prob.evaluate(nu, g, dot)) return std::numeric_limits<double>::infinity();
  double lagr = 0.0, top = -std::numeric_limits<double>::infinity(), inner = 0.0;
  for (int u = 0; u < m; ++u)
    if (w[u] > 0.0) lagr += w[u] * g[u];
  for (int v = 0; v < d; ++v) {
    double gv = 0.0;
    for (int u = 0; u < m; ++u)
      if (w[u] > 0.0) gv += w[u] * (prob.c(u, v) + prob.a(u, v) / dot[u]);
    top = std::max(top, gv);
    inner += gv * nu[v];
  }
  return lagr + std::max(0.0, top - inner);
}

// Weights on the pieces within active_tol (relative) of the minimum at nu
// that equalize the weighted gradient over the components of nu above cut
// (least squares), clipped to the simplex. Empty when the fit fails.
std::vector<double> refit_multipliers(const MaxMinProblem& prob, std::span<const double> nu, double active_tol,
                                      double cut) {
  const int m = prob.rows(), d = prob.cols();
  std::vector<double> g(m), dot(m);
  if (!prob.evaluate(nu, g, dot)) return {};
  const double low = *std::min_element(g.begin(), g.end());
  std::vector<int> active, support;
  for (int u = 0; u < m; ++u)
    if (g[u] - low <= active_tol * (1.0 + std::abs(low))) active.push_back(u);
  for (int v = 0; v < d; ++v)
    if (nu[v] > cut) support.push_back(v);
  const int k = static_cast<int>(active.size()), s = static_cast<int>(support.size());
  // Unknowns: weights on the active pieces and the common gradient level.
  Eigen::MatrixXd sys = Eigen::MatrixXd::Zero(s + 1, k + 1);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(s + 1);
  for (int r = 0; r < s; ++r) {
    for (int a = 0; a < k; ++a) {
      const int u = active[a], v = support[r];
      sys(r, a) = prob.c(u, v) + prob.a(u, v) / dot[u];
    }
    sys(r, k) = -1.0;
  }
  for (int a = 0; a < k; ++a) sys(s, a) = 1.0;
  rhs[s] = 1.0;
  const Eigen::VectorXd x = sys.completeOrthogonalDecomposition().solve(rhs);
  std::vector<double> w(m, 0.0);
  double total = 0.0;
  for (int a = 0; a < k; ++a) {
    const double val = std::isfinite(x[a]) ? std::max(0.0, x[a]) : 0.0;
    w[active[a]] = val;
    total += val;
  }
  if (!(total > 0.0)) return {};
  for (double& x : w) x /= total;
  return w;
}

// Newton polish of the KKT system on the active pieces A and the support S
// of nu: sum_A w_a grad g_a = z on S, g_a = t on A, sum w = 1, sum nu = 1.
// Returns the polished nu and weights, or nothing when a step leaves the
// feasible region or the system is singular.
std::optional<std::pair<std::vector<double>, std::vector<double>>> polish_kkt(
    const MaxMinProblem& prob, std::vector<double> nu, std::vector<double> w) {
  const int m = prob.rows(), d = prob.cols();
  std::vector<int> act, sup;
  for (int u = 0; u < m; ++u) {
    if (w[u] > kSnapThreshold)
      act.push_back(u);
    else
      w[u] = 0.0;
  }
  for (int v = 0; v < d; ++v)
    if (nu[v] > 0.0) sup.push_back(v);
  const int k = static_cast<int>(act.size()), s = static_cast<int>(sup.size());
  const int n = s + k + 2;
  std::vector<double> g(m), dot(m);
  if (!prob.evaluate(nu, g, dot)) return std::nullopt;
  double z = 0.0, t = 0.0;
  for (int a = 0; a < k; ++a) t += w[act[a]] * g[act[a]];
  for (int r = 0; r < s; ++r)
    for (int a = 0; a < k; ++a) {
      const int u = act[a], v = sup[r];
      z += nu[v] * w[u] * (prob.c(u, v) + prob.a(u, v) / dot[u]);
    }
  Eigen::MatrixXd jac(n, n);
  Eigen::VectorXd res(n);
  for (int iter = 0; iter < kPolishSteps; ++iter) {
    if (!prob.evaluate(nu, g, dot)) return std::nullopt;
    jac.setZero();
    for (int r = 0; r < s; ++r) {
      const int v = sup[r];
      res[r] = -z;
      for (int a = 0; a < k; ++a) {
        const int u = act[a];
        const double grad = prob.c(u, v) + prob.a(u, v) / dot[u];
        res[r] += w[u] * grad;
        jac(r, s + a) = grad;
        for (int q = 0; q < s; ++q)
          jac(r, q) -= w[u] * prob.a(u, v) * prob.a(u, sup[q]) / (dot[u] * dot[u]);
      }
      jac(r, s + k) = -1.0;
    }
    for (int a = 0; a < k; ++a) {
      const int u = act[a];
      res[s + a] = g[u] - t;
      for (int q = 0; q < s; ++q) jac(s + a, q) = prob.c(u, sup[q]) + prob.a(u, sup[q]) / dot[u];
      jac(s + a, s + k + 1) = -1.0;
    }
    res[s + k] = -1.0;
    res[s + k + 1] = -1.0;
    for (int a = 0; a < k; ++a) {
      res[s + k] += w[act[a]];
      jac(s + k, s + a) = 1.0;
    }
    for (int q = 0; q < s; ++q) {
      res[s + k + 1] += nu[sup[q]];
      jac(s + k + 1, q) = 1.0;
    }
    const auto lu = jac.fullPivLu();
    if (!lu.isInvertible()) return std::nullopt;
    const Eigen::VectorXd step = lu.solve(-res);
    for (int q = 0; q < s; ++q) nu[sup[q]] += step[q];
    for (int a = 0; a < k; ++a) w[act[a]] += step[s + a];
    z += step[s + k];
    t += step[s + k + 1];
    for (int q = 0; q < s; ++q)
      if (!(nu[sup[q]] > 0.0)) return std::nullopt;
    for (int a = 0; a < k; ++a)
      if (!(w[act[a]] >= 0.0)) return std::nullopt;
  }
  double total = 0.0;
  for (double x : nu) total += x;
  for (double& x : nu) x /= total;
  total = 0.0;
  for (double x : w) total += x;
  for (double& x : w) x /= total;
  return std::make_pair(std::move(nu), std::move(w));
}

}  // namespace

LocalGame make_local_game(const GameModel& model, int state, std::span<const double> log_psi) {
  LocalGame g;
  g.rows = model.num_p1(state);
  g.cols = model.num_p2(state);
  g.cost.resize(static_cast<std::size_t>(g.rows) * g.cols);
  g.log_mass.resize(g.cost.size());
  for (int u = 0; u < g.rows; ++u) {
    for (int v = 0; v < g.cols; ++v) {
      const std::size_t k = static_cast<std::size_t>(u) * g.cols + v;
      g.cost[k] = model.cost(state, u, v);
      // Inline log-sum-exp over the sparse row.
      double top = kNegInf;
      for (const auto& t : model.row(state, u, v)) {
        if (t.log_prob > kNegInf) top = std::max(top, log_psi[t.next] + t.log_prob);
      }
      if (top == kNegInf) {
        g.log_mass[k] = kNegInf;
        continue;
      }
      double s = 0.0;
      for (const auto& t : model.row(state, u, v)) {
        if (t.log_prob > kNegInf) s += std::exp(log_psi[t.next] + t.log_prob - top);
      }
      g.log_mass[k] = top + std::log(s);
    }
  }
  return g;
}

double payoff(const LocalGame& game, std::span<const double> mu, std::span<const double> nu) {
  double top = kNegInf;
  for (double x : game.log_mass) top = std::max(top, x);
  double lin = 0.0, mass = 0.0;
  for (int u = 0; u < game.rows; ++u) {
    for (int v = 0; v < game.cols; ++v) {
      const double w = mu[u] * nu[v];
      lin += w * game.c(u, v);
      if (top != kNegInf) mass += w * std::exp(game.log_a(u, v) - top);
    }
  }
  return mass > 0.0 ? lin + top + std::log(mass) : kNegInf;
}

LowerValue solve_lower(const LocalGame& game, double accuracy, long budget) {
  const int m = game.rows, d = game.cols;
  if (m == 0 || d == 0) throw InvalidArgument("local game with an empty action set");

  // A row with zero mass everywhere drives the value to -inf.
  for (int u = 0; u < m; ++u) {
    bool any = false;
    for (int v = 0; v < d; ++v) any = any || game.log_a(u, v) != kNegInf;
    if (!any) {
      LowerValue out;
      out.value = kNegInf;
      out.nu.assign(d, 1.0 / d);
      out.multipliers.assign(m, 0.0);
      out.multipliers[u] = 1.0;
      return out;
    }
  }
  if (d == 1) return pure_column(game);
  if (const auto ps = pure_saddle(game, accuracy)) {
    LowerValue out;
    out.value = ps->value;
    out.accuracy = ps->gap;
    out.nu.assign(d, 0.0);
    out.nu[ps->v] = 1.0;
    out.multipliers.assign(m, 0.0);
    out.multipliers[ps->u] = 1.0;
    return out;
  }

  const MaxMinProblem prob(game);
  const int n = d + 1;  // nu and t
  std::vector<double> nu(d, 1.0 / d), nu_new(d), g(m), dot(m), g_new(m), dot_new(m), w(m);
  std::vector<Eigen::VectorXd> grad_g(m, Eigen::VectorXd(d));
  Eigen::MatrixXd kkt(n + 1, n + 1);
  Eigen::VectorXd rhs(n + 1), step(n + 1);
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(n + 1);

  prob.evaluate(nu, g, dot);
  double t = *std::min_element(g.begin(), g.end()) - 1.0;
  double s = static_cast<double>(m + d);
  long steps = 0;
  // Last point known to be centered; its duality bound certifies the result.
  std::vector<double> nu_c;
  double t_c = 0.0;

  for (;;) {
    // Centering: maximize s t + sum_u log(g_u - t) + sum_v log nu_v on 1'nu = 1.
    bool centered = false;
    double dec2 = 0.0;
    for (int inner = 0; inner < kCenteringSteps; ++inner) {
      if (++steps > budget) throw NoConvergence("solve_lower", steps, (m + d) / s);
      prob.evaluate(nu, g, dot);
      double wsum = 0.0;
      for (int u = 0; u < m; ++u) {
        w[u] = 1.0 / (g[u] - t);
        wsum += w[u];
        for (int v = 0; v < d; ++v) grad_g[u][v] = prob.c(u, v) + prob.a(u, v) / dot[u];
      }
      kkt.setZero();
      rhs.setZero();
      for (int u = 0; u < m; ++u) {
        const double w2 = w[u] * w[u];
        for (int a = 0; a < d; ++a) {
          rhs[a] += w[u] * grad_g[u][a];
          for (int b = 0; b < d; ++b) {
            const double hess_g = -prob.a(u, a) * prob.a(u, b) / (dot[u] * dot[u]);
            kkt(a, b) -= w[u] * hess_g - w2 * grad_g[u][a] * grad_g[u][b];
          }
          kkt(a, d) -= w2 * grad_g[u][a];
          kkt(d, a) -= w2 * grad_g[u][a];
        }
        kkt(d, d) += w2;
      }
      for (int a = 0; a < d; ++a) {
        rhs[a] += 1.0 / nu[a];
        kkt(a, a) += 1.0 / (nu[a] * nu[a]);
        kkt(a, n) = 1.0;
        kkt(n, a) = 1.0;
      }
      rhs[d] = s - wsum;
      lu.compute(kkt);
      step = lu.solve(rhs);
      dec2 = 0.0;
      for (int a = 0; a < n; ++a) dec2 += rhs[a] * step[a];
      if (dec2 / 2.0 <= kCenteringTol) {
        centered = true;
        break;
      }

      // Backtracking on the exact barrier difference, computed term by term so
      // the s t part does not swamp it at large s.
      bool moved = false;
      double alpha = 1.0;
      for (int ls = 0; ls < 60 && !moved; ++ls, alpha *= 0.5) {
        bool feasible = true;
        for (int a = 0; a < d && feasible; ++a) {
          nu_new[a] = nu[a] + alpha * step[a];
          feasible = nu_new[a] > 0.0;
        }
        if (!feasible) continue;
        // Keep nu on the simplex; the equality row of the KKT solve only holds
        // to the conditioning of the system.
        double total = 0.0;
        for (int a = 0; a < d; ++a) total += nu_new[a];
        for (int a = 0; a < d; ++a) nu_new[a] /= total;
        if (!prob.evaluate(nu_new, g_new, dot_new)) continue;
        const double t_new = t + alpha * step[d];
        double diff = s * alpha * step[d];
        for (int u = 0; u < m && feasible; ++u) {
          const double slack_new = g_new[u] - t_new;
          if (!(slack_new > 0.0))
            feasible = false;
          else
            diff += std::log(slack_new / (g[u] - t));
        }
        if (!feasible) continue;
        for (int a = 0; a < d; ++a) diff += std::log(nu_new[a] / nu[a]);
        if (diff >= 0.01 * alpha * dec2) {
          nu.swap(nu_new);
          t = t_new;
          moved = true;
        }
      }
      // No ascent left at floating-point resolution of the slacks.
      if (!moved) break;
    }
    if (!centered && dec2 / 2.0 <= 1e-6) centered = true;
    if (!centered) {
      if (nu_c.empty()) throw NoConvergence("solve_lower", steps, (m + d) / s);
      break;
    }
    nu_c = nu;
    t_c = t;
    if ((m + d) / s <= accuracy) break;
    s *= kBarrierGrowth;
  }

  LowerValue out;
  out.newton_steps = steps;
  prob.evaluate(nu_c, g, dot);
  double wsum = 0.0;
  out.multipliers.resize(m);
  for (int u = 0; u < m; ++u) {
    out.multipliers[u] = 1.0 / (g[u] - t_c);
    wsum += out.multipliers[u];
  }
  for (double& x : out.multipliers) x /= wsum;
  out.nu = nu_c;
  out.value = prob.min_piece(nu_c);
  out.nu = nu_c;

  // Every point gives a lower bound and every weight vector an upper bound,
  // so keep the best of each. Barrier weights lose precision once the slacks
  // reach rounding level; weights refitted on the active pieces and a Newton
  // polish of the KKT system recover it. The active set is guessed at a few
  // cut levels since the barrier keeps dropped components alive at O(1/s).
  double bound = lagrangian_bound(prob, nu_c, out.multipliers);
  auto offer = [&](const std::vector<double>& point, const std::vector<double>& weights) {
    const double value = prob.min_piece(point);
    if (value > out.value) {
      out.value = value;
      out.nu = point;
    }
    if (weights.empty()) return;
    const double b = lagrangian_bound(prob, point, weights);
    if (b < bound) {
      bound = b;
      out.multipliers = weights;
    }
  };
  offer(nu_c, refit_multipliers(prob, nu_c, kActiveTol, 0.0));
  for (double cut : kActiveCuts) {
    if (bound - out.value <= accuracy) break;
    std::vector<double> snapped = nu_c;
    double kept = 0.0;
    for (double& x : snapped) {
      if (x < cut) x = 0.0;
      kept += x;
    }
    for (double& x : snapped) x /= kept;
    const std::vector<double> refit = refit_multipliers(prob, snapped, std::max(cut, kActiveTol), cut);
    offer(snapped, refit);
    if (refit.empty() || bound - out.value <= accuracy) continue;
    if (auto pol = polish_kkt(prob, snapped, refit)) offer(pol->first, pol->second);
  }
  out.accuracy = std::max(0.0, bound - out.value);
  return out;
}

double local_payoff(const GameModel& model, int state, std::span<const double> log_psi,
                    std::span<const double> mu, std::span<const double> nu) {
  const int m = model.num_p1(state), d = model.num_p2(state);
  // log P(j | i, mu, nu) terms over the union of row supports.
  std::vector<std::pair<int, double>> mixed;
  double lin = 0.0;
  for (int u = 0; u < m; ++u) {
    for (int v = 0; v < d; ++v) {
      const double w = mu[u] * nu[v];
      if (w == 0.0) continue;
      lin += w * model.cost(state, u, v);
      const double lw = std::log(w);
      for (const auto& t : model.row(state, u, v))
        if (t.log_prob > kNegInf) mixed.emplace_back(t.next, lw + t.log_prob);
    }
  }
  std::sort(mixed.begin(), mixed.end(),
            [](const auto& x, const auto& y) { return x.first < y.first; });
  std::vector<double> terms;
  for (std::size_t k = 0; k < mixed.size();) {
    const int j = mixed[k].first;
    for (; k < mixed.size() && mixed[k].first == j; ++k)
      terms.push_back(log_psi[j] + mixed[k].second);
  }
  const double log_mass = log_sum_exp(terms);
  return log_mass == kNegInf ? kNegInf : lin + log_mass;
}

std::pair<int, double> best_response_pure_min(const GameModel& model, int state,
                                              std::span<const double> log_psi,
                                              std::span<const double> nu) {
  const int m = model.num_p1(state);
  std::vector<double> unit(m, 0.0);
  int best = 0;
  double best_val = std::numeric_limits<double>::infinity();
  for (int u = 0; u < m; ++u) {
    unit[u] = 1.0;
    const double val = local_payoff(model, state, log_psi, unit, nu);
    unit[u] = 0.0;
    if (val < best_val) {
      best_val = val;
      best = u;
    }
  }
  return {best, best_val};
}

LocalSaddle best_saddle(const LocalGame& game, const SaddleOptions& options) {
  if (!(options.tol > 0.0)) throw InvalidArgument("solve_saddle: tol must be > 0");
  const double accuracy = std::min(1e-12, options.tol * 1e-3);
  LocalSaddle out;
  if (const auto ps = pure_saddle(game, options.tol)) {
    out.value = ps->value;
    out.mu.assign(game.rows, 0.0);
    out.mu[ps->u] = 1.0;
    out.nu.assign(game.cols, 0.0);
    out.nu[ps->v] = 1.0;
    out.gap = ps->gap;
    return out;
  }
  LowerValue low = solve_lower(game, accuracy, options.max_iterations);

  out.value = low.value;
  out.nu = low.nu;
  out.iterations = low.newton_steps;
  if (low.value == kNegInf) {
    out.mu = low.multipliers;
    out.gap = 0.0;
    return out;
  }

  // Candidate minimizers: the barrier multipliers, and the same with
  // negligible weights removed.
  std::vector<double> cleaned = low.multipliers;
  double top = *std::max_element(cleaned.begin(), cleaned.end());
  double kept = 0.0;
  for (double& x : cleaned) {
    if (x < 1e-9 * top) x = 0.0;
    kept += x;
  }
  for (double& x : cleaned) x /= kept;

  double best_gap = std::numeric_limits<double>::infinity();
  for (const auto* cand : {&cleaned, &low.multipliers}) {
    // sup_nu log F(mu, nu) is a one-row instance of the same problem.
    LocalGame row;
    row.rows = 1;
    row.cols = game.cols;
    row.cost.assign(game.cols, 0.0);
    row.log_mass.assign(game.cols, kNegInf);
    for (int v = 0; v < game.cols; ++v) {
      for (int u = 0; u < game.rows; ++u) {
        if ((*cand)[u] == 0.0) continue;
        row.cost[v] += (*cand)[u] * game.c(u, v);
        row.log_mass[v] = log_add_exp(row.log_mass[v], std::log((*cand)[u]) + game.log_a(u, v));
      }
    }
    const long remaining = options.max_iterations - out.iterations;
    if (remaining <= 0) {
      if (std::isfinite(best_gap)) break;
      throw NoConvergence("solve_saddle", out.iterations, best_gap);
    }
    const LowerValue up = solve_lower(row, accuracy, remaining);
    out.iterations += up.newton_steps;
    const double gap = std::max(0.0, up.value + up.accuracy - low.value);
    if (gap < best_gap) {
      best_gap = gap;
      out.mu = *cand;
    }
    if (best_gap <= options.tol) break;
  }
  out.gap = best_gap;
  return out;
}

LocalSaddle solve_saddle(const LocalGame& game, const SaddleOptions& options) {
  LocalSaddle out = best_saddle(game, options);
  if (out.gap > options.tol) throw NoConvergence("solve_saddle", out.iterations, out.gap);
  return out;
}

LocalSaddle solve_saddle(const GameModel& model, int state, std::span<const double> log_psi,
                         const SaddleOptions& options) {
  return solve_saddle(make_local_game(model, state, log_psi), options);
}

double shapley_value(const GameModel& model, int state, std::span<const double> log_psi) {
  return solve_lower(make_local_game(model, state, log_psi)).value;
}

}  // namespace rsgame
