// Serial reference kernels against their OpenMP versions on the birth-death
// game. Prints wall time per call and whether the outputs match bit for bit.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <vector>

#include "rsgame/birthdeath.hpp"
#include "rsgame/kernels.hpp"
#include "rsgame/montecarlo.hpp"
#include "rsgame/shapley.hpp"

using namespace rsgame;
using Clock = std::chrono::steady_clock;

template <class F>
double seconds(F&& f, int reps) {
  const auto t0 = Clock::now();
  for (int r = 0; r < reps; ++r) f();
  return std::chrono::duration<double>(Clock::now() - t0).count() / reps;
}

int main(int argc, char** argv) {
  int window = 200;
  if (argc > 1) window = std::atoi(argv[1]);
  BirthDeathParams p;
  p.window = window;
  const GameModel model = build_birth_death(p);
  std::vector<int> domain(window);
  for (int i = 0; i < window; ++i) domain[i] = i;
  std::vector<double> log_psi(window);
  for (int i = 0; i < window; ++i) log_psi[i] = 0.01 * i;
  std::vector<double> a(window), b(window);

  std::printf("threads: %d\n", thread_count());
  const double ts = seconds([&] { apply_shapley_serial(model, domain, log_psi, a); }, 5);
  const double tp = seconds([&] { apply_shapley(model, domain, log_psi, b); }, 5);
  std::printf("shapley operator (%d states, 5x5): serial %.4f s  parallel %.4f s  speedup %.2f  identical %s\n",
              window, ts, tp, ts / tp, std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0 ? "yes" : "no");

  SolveOptions so;
  so.ladder = {window};
  const SolveReport rep = solve_ergodic_game(model, so);
  SimConfig cfg;
  cfg.horizon = 1000;
  cfg.paths = 20000;
  cfg.parallel = false;
  EstimatorReport es, ep;
  const double ms = seconds([&] { es = estimate_ergodic_cost(model, rep.selectors.p1, rep.selectors.p2, cfg); }, 1);
  cfg.parallel = true;
  const double mp = seconds([&] { ep = estimate_ergodic_cost(model, rep.selectors.p1, rep.selectors.p2, cfg); }, 1);
  std::printf("estimator (T=1000, N=20000): serial %.4f s  parallel %.4f s  speedup %.2f  identical %s\n", ms, mp,
              ms / mp, es.estimate == ep.estimate && es.spread == ep.spread ? "yes" : "no");
  return 0;
}
