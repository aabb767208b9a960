#include <doctest.h>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "rsgame/birthdeath.hpp"
#include "rsgame/checks.hpp"
#include "rsgame/errors.hpp"
#include "rsgame/kernels.hpp"
#include "rsgame/model_io.hpp"
#include "rsgame/report_io.hpp"
#include "rsgame/shapley.hpp"

using namespace rsgame;
using testing::labels;

namespace {

// Closed symmetric two-state chain with zero cost everywhere except a
// matching-pennies layer at state 0: psi = 1 solves it.
GameModel pennies_layer() {
  GameModel::Builder b(2);
  b.set_actions(0, labels(2), labels(2)).set_actions(1, labels(1), labels(1));
  for (int u = 0; u < 2; ++u)
    for (int v = 0; v < 2; ++v) {
      b.add_transition(0, u, v, 0, 0.5).add_transition(0, u, v, 1, 0.5);
      b.set_cost(0, u, v, u == v ? 1.0 : 0.0);
    }
  b.add_transition(1, 0, 0, 0, 0.5).add_transition(1, 0, 0, 1, 0.5);
  return std::move(b).build();
}

SolveOptions serial() {
  SolveOptions o;
  o.parallel = false;
  return o;
}

}  // namespace

TEST_SUITE("shapley") {
  TEST_CASE("zero cost closed model: rho = 0, psi = 1, residual 0") {
    std::mt19937_64 rng(61);
    const GameModel m = testing::random_game(rng, 6, 2, 2, 0.0);
    const SolveReport r = solve_ergodic_game(m);
    CHECK(std::abs(r.rho_star) <= 1e-9);
    for (int i = 0; i < 6; ++i) CHECK(std::abs(r.log_psi_star[i]) <= 1e-8);
    CHECK(r.residual <= 1e-8);
    CHECK(r.certified);
  }

  TEST_CASE("two-state chain: rho = log 1.5 with residual below 1e-8") {
    const SolveReport r = solve_ergodic_game(testing::two_state());
    CHECK(std::abs(r.rho_star - std::log(1.5)) <= 1e-9);
    CHECK(r.residual <= 1e-8);
    CHECK(r.log_psi_star[0] == 0.0);
    CHECK(r.bracket_lo <= r.rho_star);
    CHECK(r.rho_star <= r.bracket_hi);
  }

  TEST_CASE("residual: exact scalar pair is 0, perturbed psi is not") {
    GameModel::Builder b(1);
    b.set_actions(0, labels(1), labels(1)).add_transition(0, 0, 0, 0, 1.0).set_cost(0, 0, 0, 0.25);
    const GameModel one = std::move(b).build();
    CHECK(residual(one, 0.25, std::vector<double>{0.0}, DirichletDomain::prefix(one, 1)) <= 1e-12);

    const GameModel m = testing::two_state();
    const SolveReport r = solve_ergodic_game(m);
    std::vector<double> bumped = r.log_psi_star;
    bumped[1] += 0.1;
    const double res = residual(m, r.rho_star, bumped, DirichletDomain::prefix(m, 2));
    CHECK(res > 0.05);
  }

  TEST_CASE("selectors: uncontrolled point masses and the pennies layer") {
    const SolveReport r = solve_ergodic_game(testing::two_state());
    CHECK(r.selectors.p1.at(0)[0] == 1.0);
    CHECK(r.selectors.p2.at(1)[0] == 1.0);

    const GameModel m = pennies_layer();
    const std::vector<double> flat(2, 0.0);
    const auto [mu, nu] = extract_selectors(m, flat, DirichletDomain::prefix(m, 2), 1e-8);
    CHECK(mu.at(0)[0] == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(nu.at(0)[0] == doctest::Approx(0.5).epsilon(1e-6));
  }

  TEST_CASE("selectors are unchanged when psi is scaled") {
    std::mt19937_64 rng(67);
    const GameModel m = testing::random_game(rng, 4, 3, 2);
    const SolveReport r = solve_ergodic_game(m);
    const DirichletDomain d(m, r.domain);
    std::vector<double> scaled = r.log_psi_star;
    for (double& x : scaled) x += std::log(7.5);
    const Selectors a = extract_selectors_report(m, r.log_psi_star, d, 1e-8);
    const Selectors s = extract_selectors_report(m, scaled, d, 1e-8);
    for (int i = 0; i < 4; ++i) {
      for (std::size_t u = 0; u < a.p1.at(i).size(); ++u) CHECK(std::abs(a.p1.at(i)[u] - s.p1.at(i)[u]) <= 1e-6);
      for (std::size_t v = 0; v < a.p2.at(i).size(); ++v) CHECK(std::abs(a.p2.at(i)[v] - s.p2.at(i)[v]) <= 1e-6);
    }
  }

  TEST_CASE("uncontrolled oracle") {
    // Identity chain with constant cost kappa.
    const GameModel id = testing::uncontrolled({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}, {0.7, 0.7, 0.7});
    CHECK(uncontrolled_eigen_oracle(id) == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(std::abs(uncontrolled_eigen_oracle(testing::two_state()) - std::log(1.5)) <= 1e-12);
    std::mt19937_64 rng(71);
    std::vector<std::vector<double>> p(5);
    for (auto& row : p) row = testing::random_row(rng, 5);
    CHECK(std::abs(uncontrolled_eigen_oracle(testing::uncontrolled(p, std::vector<double>(5, 0.0)))) <= 1e-10);
    CHECK_THROWS_AS(uncontrolled_eigen_oracle(testing::one_state_two_actions()), NotUncontrolled);
  }

  TEST_CASE("random uncontrolled chains agree with an independent power iteration") {
    std::mt19937_64 rng(73);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
      const int n = 2 + trial % 7;
      std::vector<std::vector<double>> p(n);
      std::vector<double> c(n);
      for (int i = 0; i < n; ++i) {
        p[i] = testing::random_row(rng, n, 0.3);
        c[i] = unif(rng);
      }
      const GameModel m = testing::uncontrolled(p, c);
      if (!check_irreducibility(m, IrreducibilityMode::sufficient).pass) continue;
      const double oracle = testing::perron_log_root(m);
      CHECK(std::abs(uncontrolled_eigen_oracle(m) - oracle) <= 1e-9);
      CHECK(std::abs(solve_ergodic_game(m).rho_star - oracle) <= 1e-8);
    }
  }

  TEST_CASE("ladder: default schedule and certification on the window") {
    std::mt19937_64 rng(79);
    const GameModel m = testing::random_game(rng, 9, 2, 2);
    CHECK(default_ladder(m) == std::vector<int>{2, 4, 8, 9});
    const SolveReport r = solve_ergodic_game(m);
    CHECK(r.ladder_converged);
    CHECK(r.domain.size() == 9);
    CHECK(r.ladder.back().domain_size == 9);
  }

  TEST_CASE("ladder exhaustion is flagged, not thrown") {
    const GameModel m = build_birth_death([] {
      BirthDeathParams p;
      p.window = 12;
      return p;
    }());
    SolveOptions o;
    o.ladder = {4, 5};
    o.tol_outer = 1e-14;
    const SolveReport r = solve_ergodic_game(m, o);
    CHECK_FALSE(r.ladder_converged);
    CHECK_FALSE(r.certified);
    bool flagged = false;
    for (const auto& w : r.warnings) flagged = flagged || w.find("LadderExhausted") != std::string::npos;
    CHECK(flagged);
  }

  TEST_CASE("birth-death: ladders (10,20,40,60) and (15,30,60) agree to 4 decimals") {
    const GameModel m = build_birth_death(BirthDeathParams{});
    SolveOptions a, b;
    a.ladder = {10, 20, 40, 60};
    b.ladder = {15, 30, 60};
    const SolveReport ra = solve_ergodic_game(m, a), rb = solve_ergodic_game(m, b);
    CHECK(ra.certified);
    CHECK(rb.certified);
    CHECK(std::abs(ra.rho_star - rb.rho_star) <= 5e-5);
    // Re-extracted selectors coincide state by state.
    for (int i = 0; i < m.num_states(); ++i) {
      for (std::size_t u = 0; u < ra.selectors.p1.at(i).size(); ++u)
        CHECK(std::abs(ra.selectors.p1.at(i)[u] - rb.selectors.p1.at(i)[u]) <= 1e-6);
      for (std::size_t v = 0; v < ra.selectors.p2.at(i).size(); ++v)
        CHECK(std::abs(ra.selectors.p2.at(i)[v] - rb.selectors.p2.at(i)[v]) <= 1e-6);
    }
    REQUIRE(ra.bound.has_value());
    for (const auto& rung : ra.ladder) {
      CHECK(rung.rho >= -1e-6);
      CHECK(rung.rho <= ra.bound->bound + 1e-6);
    }
  }

  TEST_CASE("lyapunov bound: bounded case returns gamma") {
    nlohmann::json doc = model_to_json(testing::two_state());
    doc["lyapunov"] = {{"log_W", {0.0, 0.0}}, {"gamma", 0.8}, {"K", {0, 1}}, {"C", 1.0}};
    const LyapunovBound lb = lyapunov_bound(model_from_json(doc));
    CHECK(lb.bound == 0.8);
    CHECK_THROWS_AS(lyapunov_bound(testing::two_state()), MissingLyapunovData);
  }

  TEST_CASE("a collapsing intermediate rung is skipped") {
    const GameModel m = testing::uncontrolled({{0.1, 0.0, 0.9}, {0.0, 0.5, 0.5}, {0.5, 0.5, 0.0}}, {0.0, 0.2, 0.1});
    SolveOptions o;
    o.ladder = {2, 3};
    const SolveReport r = solve_ergodic_game(m, o);
    CHECK(r.certified);
    CHECK(r.ladder.size() == 1);
    CHECK(std::abs(r.rho_star - testing::perron_log_root(m)) <= 1e-8);
    bool flagged = false;
    for (const auto& w : r.warnings) flagged = flagged || w.find("skipped") != std::string::npos;
    CHECK(flagged);
  }

  TEST_CASE("collapse is surfaced") {
    const GameModel m = testing::uncontrolled({{0, 1}, {0, 1}}, {0.0, 0.0});
    SolveOptions o;
    o.ladder = {1};
    CHECK_THROWS_AS(solve_ergodic_game(m, o), CollapseToZero);
  }

  TEST_CASE("report json round trip and ladder csv") {
    const SolveReport r = solve_ergodic_game(testing::two_state(), serial());
    const SolveReport back = solve_report_from_json(to_json(r));
    CHECK(back.rho_star == r.rho_star);
    CHECK(back.log_psi_star == r.log_psi_star);
    CHECK(back.domain == r.domain);
    CHECK(back.selectors.p1 == r.selectors.p1);
    CHECK(ladder_csv(r).rfind("n,domain_size,rho_n,bracket_width,iterations\n", 0) == 0);
  }
}

TEST_SUITE("kernels") {
  TEST_CASE("parallel Shapley kernels match the serial reference bit for bit") {
    BirthDeathParams p;
    p.window = 80;
    const GameModel m = build_birth_death(p);
    std::vector<int> dom(m.num_states());
    for (int i = 0; i < m.num_states(); ++i) dom[i] = i;
    std::vector<double> log_psi(m.num_states());
    for (int i = 0; i < m.num_states(); ++i) log_psi[i] = 0.05 * i - 0.001 * i * i;
    std::vector<double> a(m.num_states()), b(m.num_states());
    apply_shapley_serial(m, dom, log_psi, a);
    for (int threads : {1, 2, 4}) {
      set_thread_count(threads);
      apply_shapley(m, dom, log_psi, b);
      CHECK(a == b);
      CHECK(shapley_residual(m, dom, 0.3, log_psi) == shapley_residual_serial(m, dom, 0.3, log_psi));
    }
    set_thread_count(0);
  }

  TEST_CASE("solve reports do not depend on the thread count") {
    const GameModel m = build_birth_death(BirthDeathParams{});
    SolveOptions o;
    o.ladder = {10, 20, 40, 60};
    set_thread_count(1);
    const std::string one = dump_json(to_json(solve_ergodic_game(m, o)));
    set_thread_count(3);
    const std::string three = dump_json(to_json(solve_ergodic_game(m, o)));
    set_thread_count(0);
    o.parallel = false;
    const std::string ser = dump_json(to_json(solve_ergodic_game(m, o)));
    CHECK(one == three);
    // The options block records the parallel flag; compare the rest.
    auto strip = [](std::string s) {
      auto doc = nlohmann::json::parse(s);
      doc.erase("options");
      return doc.dump();
    };
    CHECK(strip(one) == strip(ser));
  }
}
