// Acceptance suite: one PASS/FAIL line per criterion.
//   acceptance                 all criteria
//   acceptance --criterion N   criterion N only
// Exit status 0 iff every criterion run passed.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "rsgame/birthdeath.hpp"
#include "rsgame/checks.hpp"
#include "rsgame/errors.hpp"
#include "rsgame/kernels.hpp"
#include "rsgame/localgame.hpp"
#include "rsgame/model_io.hpp"
#include "rsgame/montecarlo.hpp"
#include "rsgame/report_io.hpp"
#include "rsgame/shapley.hpp"

using namespace rsgame;

namespace {

struct Outcome {
  bool pass = true;
  std::vector<std::string> notes;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    notes.push_back(std::string(ok ? "ok   " : "FAIL ") + what);
  }
  void info(const std::string& what) { notes.push_back("info " + what); }
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

SimConfig sim(long t, long n, std::uint64_t seed = 1, int start = 0) {
  SimConfig c;
  c.horizon = t;
  c.paths = n;
  c.seed = seed;
  c.start = start;
  return c;
}

StationaryStrategy first_action(const GameModel& m, int player) {
  return StationaryStrategy::pure(m, player, std::vector<int>(m.num_states(), 0));
}

// The default controlled birth-death instance and its solve, shared by
// several criteria.
const GameModel& bd_model() {
  static const GameModel m = build_birth_death(BirthDeathParams{});
  return m;
}

const SolveReport& bd_report() {
  static const SolveReport r = solve_ergodic_game(bd_model());
  return r;
}

// Geometric-series instance: state 1 loops with mass p, exits to B = {0}.
struct Geometric {
  GameModel model;
  double rho, closed;
  std::vector<double> log_psi;
};

Geometric geometric() {
  const double p = 0.6, c = 0.2, rho = 0.1;
  const double q = std::exp(c - rho);
  const double closed = (1.0 - p) * q / (1.0 - p * q);
  return {testing::uncontrolled({{1.0, 0.0}, {1.0 - p, p}}, {0.0, c}), rho, closed, {0.0, std::log(closed)}};
}

Outcome criterion1() {
  Outcome o;
  std::mt19937_64 rng(101);
  std::vector<std::pair<std::string, GameModel>> cases;
  cases.emplace_back("two-state chain", testing::two_state());
  cases.emplace_back("one state, two actions", testing::one_state_two_actions());
  for (int k = 0; k < 5; ++k) cases.emplace_back("random 6x(3x3) game " + std::to_string(k), testing::random_game(rng, 6, 3, 3));
  cases.emplace_back("birth-death window 60", bd_model());
  BirthDeathParams big;
  big.window = 200;
  cases.emplace_back("birth-death window 200", build_birth_death(big));
  for (const auto& [name, m] : cases) {
    const auto t0 = std::chrono::steady_clock::now();
    const SolveReport r = name == "birth-death window 60" ? bd_report() : solve_ergodic_game(m);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    o.require(r.residual <= 1e-6, name + fmt(": residual %.2e, %.1f s", r.residual, secs));
    if (m.num_states() >= 200) o.require(secs < 60.0, name + fmt(": runtime %.1f s < 60 s", secs));
  }
  return o;
}

Outcome criterion2() {
  Outcome o;
  std::mt19937_64 rng(202);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  int checked = 0;
  double worst = 0.0;
  while (checked < 25) {
    const int n = 2 + static_cast<int>(rng() % 9);
    std::vector<std::vector<double>> p(n);
    std::vector<double> c(n);
    for (int i = 0; i < n; ++i) {
      p[i] = testing::random_row(rng, n, 0.3);
      c[i] = 2.0 * unif(rng);
    }
    const GameModel m = testing::uncontrolled(p, c);
    if (!check_irreducibility(m, IrreducibilityMode::sufficient).pass) continue;
    ++checked;
    const double err = std::abs(solve_ergodic_game(m).rho_star - uncontrolled_eigen_oracle(m));
    worst = std::max(worst, err);
  }
  o.require(worst <= 1e-8, fmt("%.0f irreducible chains, worst |rho* - oracle| = %.2e", checked, worst));
  return o;
}

Outcome criterion3() {
  Outcome o;
  std::mt19937_64 rng(303);
  std::uniform_real_distribution<double> unif(-2.0, 2.0);
  const GameModel m = testing::random_game(rng, 5, 3, 3);
  std::vector<int> dom(5);
  for (int i = 0; i < 5; ++i) dom[i] = i;
  double worst_order = 0.0, worst_homog = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> a(5), b(5), s(5), ga(5), gb(5), gs(5);
    const double lam = unif(rng);
    for (int i = 0; i < 5; ++i) {
      a[i] = unif(rng);
      b[i] = a[i] + std::abs(unif(rng));
      s[i] = a[i] + lam;
    }
    apply_shapley_serial(m, dom, a, ga);
    apply_shapley_serial(m, dom, b, gb);
    apply_shapley_serial(m, dom, s, gs);
    for (int i = 0; i < 5; ++i) {
      worst_order = std::max(worst_order, ga[i] - gb[i]);
      worst_homog = std::max(worst_homog, std::abs(gs[i] - ga[i] - lam));
    }
  }
  o.require(worst_order <= 1e-10, fmt("order preservation, worst violation %.2e", worst_order));
  o.require(worst_homog <= 1e-10, fmt("1-homogeneity, worst error %.2e", worst_homog));
  return o;
}

// min_mu max_nu log F on a 2x2 game: grid over mu, golden section over nu
// (log F is concave in nu).
double brute_upper_2x2(const LocalGame& g) {
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double best = std::numeric_limits<double>::infinity();
  for (int a = 0; a <= 4000; ++a) {
    const std::vector<double> mu{a / 4000.0, 1.0 - a / 4000.0};
    auto f = [&](double x) { return payoff(g, mu, std::vector<double>{x, 1.0 - x}); };
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 80; ++it) {
      const double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
      if (f(x1) < f(x2))
        lo = x1;
      else
        hi = x2;
    }
    best = std::min(best, std::max({f(0.5 * (lo + hi)), f(0.0), f(1.0)}));
  }
  return best;
}

Outcome criterion4() {
  Outcome o;
  std::mt19937_64 rng(404);
  int calls = 0, wide = 0, gapped_2x2 = 0;
  double worst_grid = 0.0, worst_gap = 0.0, largest_brute_gap = 0.0;
  for (int k = 0; k < 50; ++k) {
    for (int size : {2, 3}) {
      const LocalGame g = testing::random_local_game(rng, size, size);
      const LowerValue lv = solve_lower(g);
      worst_grid = std::max(worst_grid, std::abs(lv.value - testing::grid_lower(g)));
      ++calls;
      const LocalSaddle s = best_saddle(g);
      worst_gap = std::max(worst_gap, s.gap);
      if (s.gap > 1e-8) ++wide;
      if (size == 2 && s.gap > 1e-8) {
        const double gap = brute_upper_2x2(g) - lv.value;
        if (gap > 1e-6) ++gapped_2x2;
        largest_brute_gap = std::max(largest_brute_gap, gap);
      }
    }
  }
  o.require(worst_grid <= 1e-5, fmt("returned value vs simplex grid, worst difference %.2e", worst_grid));
  o.info(fmt("2x2 games with a brute-force minimax gap (upper - lower > 1e-6): %.0f, largest %.3g",
             gapped_2x2, largest_brute_gap));
  o.require(wide == 0, fmt("saddle gap <= 1e-8: %.0f of %.0f games exceed it (max gap %.3g)", wide, calls, worst_gap));
  return o;
}

Outcome criterion5() {
  Outcome o;
  const SolveReport& r = bd_report();
  if (!r.bound) {
    o.require(false, "Lyapunov bound missing on the birth-death instance");
    return o;
  }
  const double k = r.bound->bound;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& rung : r.ladder) {
    lo = std::min(lo, rung.rho);
    hi = std::max(hi, rung.rho);
  }
  o.require(lo >= -1e-6 && hi <= k + 1e-6,
            fmt("rungs rho_n in [%.6f, %.6f], bound k1 + k2 = %.6f", lo, hi, k));
  return o;
}

Outcome criterion6() {
  Outcome o;
  {
    const GameModel m = testing::two_state();
    const SaddleVerdict v = verify_saddle(m, first_action(m, 1), first_action(m, 2), std::log(1.5), sim(2000, 20000), 8);
    o.require(v.pass, fmt("two-state chain: J = %.6f, spread %.2e, target log 1.5 = %.6f", v.base.estimate,
                          v.base.spread, std::log(1.5)));
  }
  {
    const GameModel m = testing::one_state_two_actions();
    const SaddleVerdict v = verify_saddle(m, first_action(m, 1), first_action(m, 2), 1.0, sim(2000, 20000), 8);
    double low = std::numeric_limits<double>::infinity();
    for (const auto& d : v.deviations) low = std::min(low, d.report.estimate);
    o.require(v.pass, fmt("one state, two actions: J = %.6f, lowest deviation %.6f, target 1", v.base.estimate, low));
  }
  {
    const SolveReport& r = bd_report();
    SimConfig c = sim(5000, 50000);
    c.absorb_exit = true;
    const SaddleVerdict v = verify_saddle(bd_model(), r, c, 8);
    int bad = 0;
    for (const auto& d : v.deviations) bad += !d.pass;
    o.require(v.pass, fmt("birth-death: J = %.6f vs rho* = %.6f, spread %.2e", v.base.estimate, r.rho_star,
                          v.base.spread) +
                          fmt(", %.0f of %.0f deviations outside the band", bad, static_cast<double>(v.deviations.size())));
  }
  return o;
}

Outcome criterion7() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  {
    const Geometric g = geometric();
    const RepresentationVerdict v = verify_stochastic_representation(
        g.model, first_action(g.model, 1), first_action(g.model, 2), g.rho, g.log_psi, {0}, {1}, sim(1, 100000, 7));
    o.require(v.verdict == Verdict::pass, fmt("geometric series: estimate %.6f, closed form %.6f, spread %.2e",
                                              v.states[0].estimate, g.closed, v.states[0].spread));
  }
  {
    const RepresentationVerdict v =
        verify_stochastic_representation(bd_model(), bd_report(), {0, 1, 2, 3, 4}, {6, 10}, sim(1, 2000000, 1));
    for (const auto& s : v.states)
      o.require(s.verdict == Verdict::pass,
                "birth-death B = {0..4}, start " + std::to_string(s.start) +
                    fmt(": estimate %.6g, psi* %.6g, spread %.2e", s.estimate, s.psi, s.spread));
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  o.require(secs < 120.0, fmt("runtime %.1f s < 120 s", secs));
  return o;
}

Outcome criterion8() {
  Outcome o;
  const Prop52Report r = verify_prop_5_2(BirthDeathParams{}, 200);
  o.require(r.pass, fmt("p_hat = 0.1, i <= 200: drift and norm-like checks pass (worst log slack %.4f)", r.worst_log_slack));
  BirthDeathParams p;
  p.p_hat = 0.2;
  p.allow_p_hat = true;
  const Prop52Report q = verify_prop_5_2(p, 200);
  o.require(!q.norm_like.pass, "p_hat = 0.2: norm-like surrogate fails");
  return o;
}

Outcome criterion9() {
  Outcome o;
  const GameModel& m = bd_model();
  SolveOptions so;
  so.ladder = {10, 20, 40, 60};
  std::vector<std::string> solves, estimates, csvs;
  for (int threads : {1, 2, 4, 1}) {
    set_thread_count(threads);
    const SolveReport r = solve_ergodic_game(m, so);
    solves.push_back(dump_json(to_json(r)));
    SimConfig c = sim(300, 2000, 42, 3);
    c.absorb_exit = true;
    estimates.push_back(dump_json(to_json(estimate_ergodic_cost(m, r.selectors.p1, r.selectors.p2, c))));
    c.paths = 50;
    csvs.push_back(simulate_paths(m, r.selectors.p1, r.selectors.p2, c).csv());
  }
  set_thread_count(0);
  auto same = [](const std::vector<std::string>& v) {
    for (const auto& s : v)
      if (s != v.front()) return false;
    return true;
  };
  o.require(same(solves), "SolveReport JSON identical across runs at 1, 2, 4 threads");
  o.require(same(estimates), "EstimatorReport JSON identical across runs at 1, 2, 4 threads");
  o.require(same(csvs), "PathBatch CSV identical across runs at 1, 2, 4 threads");
  return o;
}

Outcome criterion10() {
  Outcome o;
  auto check = [&](const std::string& name, const GameModel& m, const SolveReport& r, int a, int b, long t, long n,
                   bool absorb) {
    SimConfig ca = sim(t, n, 5, a), cb = sim(t, n, 5, b);
    ca.absorb_exit = cb.absorb_exit = absorb;
    const EstimatorReport ea = estimate_ergodic_cost(m, r.selectors.p1, r.selectors.p2, ca);
    const EstimatorReport eb = estimate_ergodic_cost(m, r.selectors.p1, r.selectors.p2, cb);
    const double band = 3.0 * std::hypot(ea.spread, eb.spread);
    o.require(std::abs(ea.estimate - eb.estimate) <= band,
              name + ", starts " + std::to_string(a) + " and " + std::to_string(b) +
                  fmt(": %.6f vs %.6f, band %.2e", ea.estimate, eb.estimate, band));
  };
  std::mt19937_64 rng(1010);
  const GameModel g = testing::random_game(rng, 6, 2, 2);
  check("random 6-state game", g, solve_ergodic_game(g), 0, 5, 2000, 20000, false);
  check("birth-death", bd_model(), bd_report(), 0, 5, 50000, 20000, true);
  const auto& lp = bd_report().log_psi_star;
  o.info(fmt("birth-death start transient (log psi(5) - log psi(0)) / T = %.2e", (lp[5] - lp[0]) / 50000.0));
  return o;
}

const std::vector<std::function<Outcome()>> kCriteria = {criterion1, criterion2, criterion3, criterion4,
                                                          criterion5, criterion6, criterion7, criterion8,
                                                          criterion9, criterion10};

const char* const kTitles[] = {"Shapley residual",         "Perron oracle equivalence",
                               "operator laws",            "local game duality",
                               "eigenvalue bounds",        "saddle verification by simulation",
                               "stochastic representation", "birth-death assumption suite",
                               "determinism",              "value state-independence"};

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> run;
  for (int k = 1; k < argc; ++k) {
    const std::string a = argv[k];
    if (a == "--criterion" && k + 1 < argc) {
      run.push_back(std::atoi(argv[++k]));
    } else {
      std::fprintf(stderr, "usage: acceptance [--criterion N]...\n");
      return 2;
    }
  }
  if (run.empty())
    for (int n = 1; n <= static_cast<int>(kCriteria.size()); ++n) run.push_back(n);

  bool all = true;
  for (int n : run) {
    if (n < 1 || n > static_cast<int>(kCriteria.size())) {
      std::fprintf(stderr, "no criterion %d\n", n);
      return 2;
    }
    Outcome out;
    try {
      out = kCriteria[n - 1]();
    } catch (const std::exception& e) {
      out.require(false, std::string("exception: ") + e.what());
    }
    for (const auto& note : out.notes) std::printf("    %s\n", note.c_str());
    std::printf("criterion %d (%s): %s\n", n, kTitles[n - 1], out.pass ? "PASS" : "FAIL");
    std::fflush(stdout);
    all = all && out.pass;
  }
  return all ? 0 : 1;
}
