#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "rsgame/localgame.hpp"
#include "rsgame/model.hpp"

namespace testing {

using rsgame::GameModel;

// Labels "0".."k-1".
inline std::vector<std::string> labels(int k) {
  std::vector<std::string> out;
  for (int a = 0; a < k; ++a) out.push_back(std::to_string(a));
  return out;
}

// Singleton actions everywhere, dense kernel P, per-state cost c.
inline GameModel uncontrolled(const std::vector<std::vector<double>>& p, const std::vector<double>& c,
                              int i0 = 0) {
  const int n = static_cast<int>(p.size());
  GameModel::Builder b(n);
  for (int i = 0; i < n; ++i) {
    b.set_actions(i, labels(1), labels(1));
    for (int j = 0; j < n; ++j)
      if (p[i][j] != 0.0) b.add_transition(i, 0, 0, j, p[i][j]);
    b.set_cost(i, 0, 0, c[i]);
  }
  b.set_i0(i0);
  return std::move(b).build();
}

// P = [[.5,.5],[.5,.5]], c = (0, log 2); rho = log 1.5.
inline GameModel two_state() { return uncontrolled({{0.5, 0.5}, {0.5, 0.5}}, {0.0, std::log(2.0)}); }

// One state, player 1 picks cost 1 or 2, player 2 has one action; rho = 1.
inline GameModel one_state_two_actions() {
  GameModel::Builder b(1);
  b.set_actions(0, {"a", "b"}, {"x"});
  b.add_transition(0, 0, 0, 0, 1.0).add_transition(0, 1, 0, 0, 1.0);
  b.set_cost(0, 0, 0, 1.0).set_cost(0, 1, 0, 2.0);
  return std::move(b).build();
}

inline std::vector<double> random_row(std::mt19937_64& rng, int n, double zero_prob = 0.0) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> row(n);
  double s = 0.0;
  for (double& x : row) s += (x = unif(rng) < zero_prob ? 0.0 : unif(rng) + 1e-3);
  if (s == 0.0) {
    row[0] = 1.0;
    return row;
  }
  for (double& x : row) x /= s;
  return row;
}

// Random closed game with m x d actions per state and full-support rows.
inline GameModel random_game(std::mt19937_64& rng, int n, int m, int d, double cost_scale = 1.0) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  GameModel::Builder b(n);
  for (int i = 0; i < n; ++i) {
    b.set_actions(i, labels(m), labels(d));
    for (int u = 0; u < m; ++u) {
      for (int v = 0; v < d; ++v) {
        const auto row = random_row(rng, n);
        for (int j = 0; j < n; ++j) b.add_transition(i, u, v, j, row[j]);
        b.set_cost(i, u, v, cost_scale * unif(rng));
      }
    }
  }
  return std::move(b).build();
}

// Perron root of M(i,j) = e^{c(i)} P(j|i) by plain power iteration on the
// dense matrix; independent of the library's solvers.
inline double perron_log_root(const GameModel& model, int iterations = 20000) {
  const int n = model.num_states();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (const auto& t : model.row(i, 0, 0)) m(i, t.next) += std::exp(model.cost(i, 0, 0)) * t.prob;
  // Shift by the identity to break periodicity; the Perron root moves by 1.
  const Eigen::MatrixXd shifted = m + Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd x = Eigen::VectorXd::Ones(n);
  double lambda = 0.0;
  for (int k = 0; k < iterations; ++k) {
    const Eigen::VectorXd y = shifted * x;
    lambda = y.maxCoeff() / x.maxCoeff();
    x = y / y.maxCoeff();
  }
  return std::log(lambda - 1.0);
}

// min_u log F(u, nu): the minimizer's best reply is a vertex.
inline double pure_min(const rsgame::LocalGame& g, const std::vector<double>& nu) {
  double best = std::numeric_limits<double>::infinity();
  std::vector<double> mu(g.rows, 0.0);
  for (int u = 0; u < g.rows; ++u) {
    std::fill(mu.begin(), mu.end(), 0.0);
    mu[u] = 1.0;
    best = std::min(best, rsgame::payoff(g, mu, nu));
  }
  return best;
}

// max_nu min_u log F(u, nu) by brute force over a simplex grid (1 to 3
// columns), zoomed around the best point for a few rounds.
inline double grid_lower(const rsgame::LocalGame& g, int points = 300, int rounds = 12) {
  if (g.cols == 1) return pure_min(g, {1.0});
  std::vector<double> lo(g.cols, 0.0), hi(g.cols, 1.0), best_nu(g.cols, 1.0 / g.cols);
  double best = -std::numeric_limits<double>::infinity();
  std::vector<double> nu(g.cols);
  for (int r = 0; r < rounds; ++r) {
    if (g.cols == 2) {
      for (int k = 0; k <= points; ++k) {
        nu[0] = lo[0] + (hi[0] - lo[0]) * k / points;
        nu[1] = 1.0 - nu[0];
        const double val = pure_min(g, nu);
        if (val > best) best = val, best_nu = nu;
      }
    } else {
      const int s = std::max(20, points / 4);
      for (int a = 0; a <= s; ++a) {
        for (int c = 0; c <= s; ++c) {
          nu[0] = lo[0] + (hi[0] - lo[0]) * a / s;
          nu[1] = lo[1] + (hi[1] - lo[1]) * c / s;
          nu[2] = 1.0 - nu[0] - nu[1];
          if (nu[2] < 0.0) continue;
          const double val = pure_min(g, nu);
          if (val > best) best = val, best_nu = nu;
        }
      }
    }
    for (int k = 0; k < g.cols; ++k) {
      const double w = (hi[k] - lo[k]) / 10.0;
      lo[k] = std::max(0.0, best_nu[k] - w);
      hi[k] = std::min(1.0, best_nu[k] + w);
    }
  }
  return best;
}

inline rsgame::LocalGame random_local_game(std::mt19937_64& rng, int m, int d) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  rsgame::LocalGame g;
  g.rows = m;
  g.cols = d;
  for (int k = 0; k < m * d; ++k) {
    g.cost.push_back(unif(rng));
    g.log_mass.push_back(std::log(0.2 + unif(rng)));
  }
  return g;
}

}  // namespace testing
