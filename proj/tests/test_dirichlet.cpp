#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "helpers.hpp"
#include "rsgame/dirichlet.hpp"
#include "rsgame/errors.hpp"
#include "rsgame/kernels.hpp"
#include "rsgame/logmath.hpp"

using namespace rsgame;
using testing::labels;

namespace {

// One state with a self-loop of mass p under every action pair and costs c.
GameModel self_loop(double p, const std::vector<std::vector<double>>& c) {
  const int m = static_cast<int>(c.size()), d = static_cast<int>(c[0].size());
  GameModel::Builder b(1);
  b.set_actions(0, labels(m), labels(d)).set_closed(p >= 1.0);
  for (int u = 0; u < m; ++u)
    for (int v = 0; v < d; ++v) b.add_transition(0, u, v, 0, p).set_cost(0, u, v, c[u][v]);
  return std::move(b).build();
}

}  // namespace

TEST_SUITE("dirichlet") {
  TEST_CASE("domain construction") {
    const GameModel m = testing::two_state();
    const DirichletDomain d(m, {1, 0, 1});
    CHECK(d.size() == 2);
    CHECK(d.contains(0));
    CHECK_FALSE(d.contains(2));
    CHECK(d.i0_position() == 0);
    CHECK_THROWS_AS(DirichletDomain(m, {1}), InvalidArgument);
    CHECK_THROWS_AS(DirichletDomain(m, {0, 4}), InvalidArgument);
    CHECK(DirichletDomain::prefix(m, 2).size() == 2);
  }

  TEST_CASE("single state: rho = c + log p, psi = 1") {
    // Singleton actions, and a 2x2 game whose saddle value is the same scalar.
    const GameModel one = self_loop(0.6, {{0.4}});
    const EigenPair e = dirichlet_eigenpair(DirichletDomain::prefix(one, 1));
    CHECK(e.rho == doctest::Approx(0.4 + std::log(0.6)).epsilon(1e-12));
    CHECK(e.log_psi[0] == 0.0);
    const GameModel pennies = self_loop(0.6, {{1.0, 0.0}, {0.0, 1.0}});
    const EigenPair f = dirichlet_eigenpair(DirichletDomain::prefix(pennies, 1));
    CHECK(f.rho == doctest::Approx(0.5 + std::log(0.6)).epsilon(1e-9));
  }

  TEST_CASE("two-state chain: rho = log 1.5 from the characteristic polynomial") {
    // M = [[.5,.5],[1,1]]: lambda^2 - 1.5 lambda = 0.
    const EigenPair e = dirichlet_eigenpair(DirichletDomain::prefix(testing::two_state(), 2));
    CHECK(std::abs(e.rho - std::log(1.5)) <= 1e-9);
    CHECK(e.bracket_lo <= e.rho);
    CHECK(e.rho <= e.bracket_hi);
    CHECK(e.bracket_width() <= 1e-8);
    // psi solves .5 psi0 + .5 psi1 = 1.5 psi0: psi1 = 2.
    CHECK(e.log_psi[0] == 0.0);
    CHECK(e.log_psi[1] == doctest::Approx(std::log(2.0)).epsilon(1e-9));
  }

  TEST_CASE("zero cost on a closed domain: rho = 0, psi = 1") {
    std::mt19937_64 rng(41);
    const GameModel m = testing::random_game(rng, 5, 2, 2, 0.0);
    const EigenPair e = dirichlet_eigenpair(DirichletDomain::prefix(m, 5));
    CHECK(std::abs(e.rho) <= 1e-9);
    for (int i = 0; i < 5; ++i) CHECK(std::abs(e.log_psi[i]) <= 1e-8);
  }

  TEST_CASE("sub-domain of a chain matches the Perron root of the restricted matrix") {
    std::mt19937_64 rng(43);
    std::vector<std::vector<double>> p(5);
    std::vector<double> c(5);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int i = 0; i < 5; ++i) {
      p[i] = testing::random_row(rng, 5);
      c[i] = unif(rng);
    }
    const GameModel m = testing::uncontrolled(p, c);
    const EigenPair e = dirichlet_eigenpair(DirichletDomain(m, {0, 1, 3}));
    Eigen::Matrix3d sub;
    const int idx[3] = {0, 1, 3};
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) sub(a, b) = std::exp(c[idx[a]]) * p[idx[a]][idx[b]];
    const double root = sub.eigenvalues().cwiseAbs().maxCoeff();
    CHECK(std::abs(e.rho - std::log(root)) <= 1e-8);
    CHECK(e.log_psi[2] == kNegInf);
    CHECK(e.log_psi[4] == kNegInf);
  }

  TEST_CASE("periodic chain converges through damping") {
    const GameModel m = testing::uncontrolled({{0, 1}, {1, 0}}, {0.3, 0.1});
    const EigenPair e = dirichlet_eigenpair(DirichletDomain::prefix(m, 2));
    CHECK(std::abs(e.rho - 0.2) <= 1e-8);
  }

  TEST_CASE("unreachable reference state collapses to zero") {
    // State 0 moves to the absorbing state 1, which is outside the domain.
    const GameModel m = testing::uncontrolled({{0, 1}, {0, 1}}, {0.0, 0.0});
    CHECK_THROWS_AS(dirichlet_eigenpair(DirichletDomain::prefix(m, 1)), CollapseToZero);
  }

  TEST_CASE("reference state outside the dominant class collapses to zero") {
    // On {0, 1} state 0 never reaches 1, whose self-loop dominates.
    const GameModel m = testing::uncontrolled({{0.1, 0.0, 0.9}, {0.0, 0.5, 0.5}, {0.5, 0.5, 0.0}}, {0.0, 0.0, 0.0});
    CHECK_THROWS_AS(dirichlet_eigenpair(DirichletDomain::prefix(m, 2)), CollapseToZero);
    CHECK(std::abs(dirichlet_eigenpair(DirichletDomain::prefix(m, 3)).rho) <= 1e-9);
  }

  TEST_CASE("iteration budget exhaustion reports the bracket") {
    std::mt19937_64 rng(47);
    const GameModel m = testing::random_game(rng, 6, 2, 2);
    EigenOptions o;
    o.max_iterations = 1;
    o.tol = 1e-15;
    CHECK_THROWS_AS(dirichlet_eigenpair(DirichletDomain::prefix(m, 6), o), NoConvergence);
  }

  TEST_CASE("operator is order preserving and 1-homogeneous on random psi") {
    std::mt19937_64 rng(53);
    std::uniform_real_distribution<double> unif(-2.0, 2.0);
    const GameModel m = testing::random_game(rng, 4, 2, 3);
    const DirichletDomain d = DirichletDomain::prefix(m, 4);
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<double> a(4), b(4), ga(4), gb(4), gs(4), shifted(4);
      const double lam = unif(rng);
      for (int i = 0; i < 4; ++i) {
        a[i] = unif(rng);
        b[i] = a[i] + std::abs(unif(rng));
        shifted[i] = a[i] + lam;
      }
      apply_shapley_serial(m, d.states(), a, ga);
      apply_shapley_serial(m, d.states(), b, gb);
      apply_shapley_serial(m, d.states(), shifted, gs);
      for (int i = 0; i < 4; ++i) {
        CHECK(ga[i] <= gb[i] + 1e-10);
        CHECK(std::abs(gs[i] - (ga[i] + lam)) <= 1e-10);
      }
    }
  }

  TEST_CASE("eigenpair json round trip") {
    const EigenPair e = dirichlet_eigenpair(DirichletDomain::prefix(testing::two_state(), 2));
    const nlohmann::json doc = eigenpair_to_json(e);
    CHECK(doc.contains("rho"));
    CHECK(doc.at("psi").size() == 2);
    const EigenPair r = eigenpair_from_json(doc);
    CHECK(r.rho == e.rho);
    CHECK(r.log_psi == e.log_psi);
    CHECK(r.domain == e.domain);
  }

  TEST_CASE("source problem: g = 0 gives phi = 0") {
    std::mt19937_64 rng(59);
    const GameModel m = testing::random_game(rng, 3, 2, 2);
    const std::vector<double> cbar(m.num_pairs(), -0.5), g(3, 0.0);
    const auto phi = solve_source_problem(DirichletDomain::prefix(m, 3), cbar, g);
    for (double x : phi) CHECK(x == 0.0);
  }

  TEST_CASE("source problem: scalar fixed point phi = e^{-1} phi + 1") {
    const GameModel m = self_loop(1.0, {{0.0, 0.0}, {0.0, 0.0}});
    const std::vector<double> cbar(m.num_pairs(), -1.0), g{1.0};
    const auto phi = solve_source_problem(DirichletDomain::prefix(m, 1), cbar, g);
    CHECK(std::abs(phi[0] - 1.0 / (1.0 - std::exp(-1.0))) <= 1e-10);
  }

  TEST_CASE("source problem: uncontrolled domain matches a dense linear solve") {
    const GameModel m = testing::uncontrolled({{0.3, 0.7}, {0.6, 0.4}}, {0.0, 0.0});
    const std::vector<double> cbar(m.num_pairs(), -0.5), g{1.0, 0.0};
    const auto phi = solve_source_problem(DirichletDomain::prefix(m, 2), cbar, g);
    Eigen::Matrix2d a;
    a << 0.3, 0.7, 0.6, 0.4;
    const Eigen::Vector2d x =
        (Eigen::Matrix2d::Identity() - std::exp(-0.5) * a).partialPivLu().solve(Eigen::Vector2d(1.0, 0.0));
    CHECK(std::abs(phi[0] - x(0)) <= 1e-10);
    CHECK(std::abs(phi[1] - x(1)) <= 1e-10);
  }

  TEST_CASE("source problem: zero outside the domain and guarded preconditions") {
    const GameModel m = testing::uncontrolled({{0.3, 0.7}, {0.6, 0.4}}, {0.0, 0.0});
    const std::vector<double> g{1.0, 1.0};
    const auto phi = solve_source_problem(DirichletDomain::prefix(m, 1), std::vector<double>(2, -0.5), g);
    CHECK(phi[1] == 0.0);
    CHECK(std::abs(phi[0] - 1.0 / (1.0 - std::exp(-0.5) * 0.3)) <= 1e-10);
    CHECK_THROWS_AS(solve_source_problem(DirichletDomain::prefix(m, 2), std::vector<double>(2, 0.0), g),
                    NotStrictlyNegative);
    CHECK_THROWS_AS(
        solve_source_problem(DirichletDomain::prefix(m, 2), std::vector<double>(2, -1.0), std::vector<double>{1.0, -1.0}),
        InvalidArgument);
  }
}
