#include "rsgame/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "rsgame/checks.hpp"
#include "rsgame/errors.hpp"
#include "rsgame/logmath.hpp"

namespace rsgame {
namespace {

// Counter-based stream per (seed, path): the k-th draw is splitmix64's
// finalizer applied to key + k * golden, so a path gets the same numbers
// whichever thread runs it and opening a stream costs nothing.
class PathRng {
 public:
  PathRng(std::uint64_t seed, std::uint64_t path)
      : key_(mix(mix(seed) ^ (path * 0xd1b54a32d192ed03ULL + 0x8cb92ba72f3d8dd7ULL))) {}
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  std::uint64_t next() { return mix(key_ + 0x9e3779b97f4a7c15ULL * ++counter_); }

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

int categorical(const std::vector<double>& cum, double r) {
  const int n = static_cast<int>(cum.size());
  for (int k = 0; k < n; ++k)
    if (r < cum[k]) return k;
  return n - 1;
}

std::vector<double> cumulative(std::span<const double> w) {
  std::vector<double> c(w.size());
  double s = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k) c[k] = (s += w[k]);
  return c;
}

// Transition sampler for a fixed stationary pair.
class Sampler {
 public:
  Sampler(const GameModel& model, const StationaryStrategy& pi1, const StationaryStrategy& pi2,
          const std::optional<DeviationSpec>& deviation, bool absorb_exit)
      : model_(model), mu_(pi1), nu_(pi2) {
    if (deviation) {
      StationaryStrategy& target = deviation->player == 1 ? mu_ : nu_;
      const auto& rep = deviation->replacement;
      if (rep.num_states() != model.num_states())
        throw InvalidArgument("deviation strategy does not cover the window");
      if (deviation->states.empty()) {
        target = rep;
      } else {
        for (int i : deviation->states) {
          if (i < 0 || i >= model.num_states()) throw InvalidArgument("deviation state out of range");
          const auto w = rep.at(i);
          target.mutable_at(i).assign(w.begin(), w.end());
        }
      }
    }
    for (int player : {1, 2}) {
      const auto problems = validate_strategy(model, player, player == 1 ? mu_ : nu_);
      if (!problems.empty())
        throw InvalidArgument("player " + std::to_string(player) + " strategy: " + problems.front());
    }
    const int n = model.num_states();
    cum_mu_.resize(n);
    cum_nu_.resize(n);
    mixed_cost_.assign(n, 0.0);
    pure_u_.assign(n, -1);
    pure_v_.assign(n, -1);
    for (int i = 0; i < n; ++i) {
      const auto mu = mu_.at(i), nu = nu_.at(i);
      cum_mu_[i] = cumulative(mu);
      cum_nu_[i] = cumulative(nu);
      for (int u = 0; u < model.num_p1(i); ++u) {
        if (mu[u] == 1.0) pure_u_[i] = u;
        for (int v = 0; v < model.num_p2(i); ++v) {
          mixed_cost_[i] += mu[u] * nu[v] * model.cost(i, u, v);
          const double exit = model.exit_mass(i, u, v);
          if (!absorb_exit && mu[u] * nu[v] > 0.0 && exit > kRowSumTol) throw OpenModel(i, exit);
        }
      }
      for (int v = 0; v < model.num_p2(i); ++v)
        if (nu[v] == 1.0) pure_v_[i] = v;
    }
    row_base_.assign(model.num_pairs() + 1, 0);
    for (int i = 0; i < n; ++i) {
      for (int u = 0; u < model.num_p1(i); ++u) {
        for (int v = 0; v < model.num_p2(i); ++v) {
          const std::size_t p = model.pair_index(i, u, v);
          double s = 0.0;
          for (const auto& t : model.row(i, u, v)) {
            s += t.prob;
            next_.push_back(t.next);
            cum_.push_back(s);
          }
          row_base_[p + 1] = next_.size();
        }
      }
    }
  }

  double cost(int i) const { return mixed_cost_[i]; }

  int draw_u(int i, PathRng& rng) const {
    return pure_u_[i] >= 0 ? pure_u_[i] : categorical(cum_mu_[i], rng.uniform());
  }
  int draw_v(int i, PathRng& rng) const {
    return pure_v_[i] >= 0 ? pure_v_[i] : categorical(cum_nu_[i], rng.uniform());
  }
  // Next state, or -1 when the draw falls into the exit mass.
  int draw_next(int i, int u, int v, PathRng& rng) const {
    const std::size_t p = model_.pair_index(i, u, v);
    const std::size_t lo = row_base_[p], hi = row_base_[p + 1];
    if (lo == hi) return -1;
    const double r = rng.uniform();
    for (std::size_t k = lo; k < hi; ++k)
      if (r < cum_[k]) return next_[k];
    // Round-off at the top of a stochastic row, otherwise genuine exit.
    return cum_[hi - 1] >= 1.0 - kRowSumTol ? next_[hi - 1] : -1;
  }
  int step(int i, PathRng& rng, int* u_out = nullptr, int* v_out = nullptr) const {
    const int u = draw_u(i, rng);
    const int v = draw_v(i, rng);
    if (u_out) *u_out = u;
    if (v_out) *v_out = v;
    return draw_next(i, u, v, rng);
  }

 private:
  const GameModel& model_;
  StationaryStrategy mu_, nu_;
  std::vector<std::vector<double>> cum_mu_, cum_nu_;
  std::vector<double> mixed_cost_;
  std::vector<int> pure_u_, pure_v_;
  std::vector<std::size_t> row_base_;
  std::vector<int> next_;
  std::vector<double> cum_;
};

// Next-state law tilted by psi: Q(j) = P(j) psi(j) / Z. step() adds the log
// likelihood ratio log Z - log psi(j) to the running exponent.
class Tilt {
 public:
  Tilt(const GameModel& model, const std::vector<double>& log_psi) {
    const int n = model.num_states();
    if (static_cast<int>(log_psi.size()) != n)
      throw InvalidArgument("proposal needs one log weight per state");
    double floor = std::numeric_limits<double>::infinity();
    for (double x : log_psi)
      if (std::isfinite(x)) floor = std::min(floor, x);
    if (!std::isfinite(floor)) throw InvalidArgument("proposal has no finite weight");
    lw_.resize(n);
    for (int i = 0; i < n; ++i) {
      if (std::isnan(log_psi[i]) || log_psi[i] == std::numeric_limits<double>::infinity())
        throw InvalidArgument("proposal weights must be finite or -inf");
      lw_[i] = std::isfinite(log_psi[i]) ? log_psi[i] : floor;
    }
    base_.assign(model.num_pairs() + 1, 0);
    log_z_.assign(model.num_pairs(), kNegInf);
    std::vector<double> terms;
    for (int i = 0; i < n; ++i) {
      for (int u = 0; u < model.num_p1(i); ++u) {
        for (int v = 0; v < model.num_p2(i); ++v) {
          const std::size_t p = model.pair_index(i, u, v);
          terms.clear();
          for (const auto& t : model.row(i, u, v))
            if (t.log_prob > kNegInf) terms.push_back(t.log_prob + lw_[t.next]);
          log_z_[p] = log_sum_exp(terms);
          double c = 0.0;
          for (const auto& t : model.row(i, u, v)) {
            if (t.log_prob == kNegInf) continue;
            next_.push_back(t.next);
            cum_.push_back(c += std::exp(t.log_prob + lw_[t.next] - log_z_[p]));
          }
          base_[p + 1] = next_.size();
        }
      }
    }
  }

  // Next state, or -1 when the row has no mass inside the window.
  int step(std::size_t pair, PathRng& rng, double& exponent) const {
    const std::size_t lo = base_[pair], hi = base_[pair + 1];
    if (lo == hi) return -1;
    const double r = rng.uniform() * cum_[hi - 1];
    std::size_t k = lo;
    while (k + 1 < hi && !(r < cum_[k])) ++k;
    exponent += log_z_[pair] - lw_[next_[k]];
    return next_[k];
  }

 private:
  std::vector<double> lw_, log_z_, cum_;
  std::vector<std::size_t> base_;
  std::vector<int> next_;
};

void check_config(const GameModel& model, const SimConfig& cfg) {
  if (cfg.horizon < 1) throw InvalidArgument("horizon T must be >= 1");
  if (cfg.paths < 1) throw InvalidArgument("path count N must be >= 1");
  if (cfg.start < 0 || cfg.start >= model.num_states())
    throw InvalidArgument("start state out of range");
}

template <class F>
void for_paths(long n, bool parallel, F&& body) {
  if (parallel) {
#pragma omp parallel for schedule(static)
    for (long p = 0; p < n; ++p) body(p);
  } else {
    for (long p = 0; p < n; ++p) body(p);
  }
}

// Pairwise sum in a fixed tree shape.
double pairwise_sum(const double* x, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k) s += x[k];
    return s;
  }
  const std::size_t h = n / 2;
  return pairwise_sum(x, h) + pairwise_sum(x + h, n - h);
}

// log sum_k e^{x_k} over a range as (max, log sum e^{x_k - max}), with a
// fixed reduction order.
std::pair<double, double> lse_parts(const std::vector<double>& x, std::size_t lo, std::size_t hi) {
  double m = kNegInf;
  for (std::size_t k = lo; k < hi; ++k) m = std::max(m, x[k]);
  if (m == kNegInf) return {kNegInf, 0.0};
  std::vector<double> e(hi - lo);
  for (std::size_t k = lo; k < hi; ++k) e[k - lo] = std::exp(x[k] - m);
  return {m, std::log(pairwise_sum(e.data(), e.size()))};
}

double sample_std(const std::vector<double>& x) {
  const double n = static_cast<double>(x.size());
  const double mean = pairwise_sum(x.data(), x.size()) / n;
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / (n - 1.0));
}

// Mean and standard error of e^{x_k}, computed with a common shift.
MeanEstimate exp_mean(const std::vector<double>& x) {
  MeanEstimate out;
  if (x.empty()) return out;
  double m = kNegInf;
  for (double v : x) m = std::max(m, v);
  if (m == kNegInf) return out;
  std::vector<double> e(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) e[k] = std::exp(x[k] - m);
  const double scale = std::exp(m);
  out.mean = scale * pairwise_sum(e.data(), e.size()) / static_cast<double>(e.size());
  out.spread = x.size() > 1 ? scale * sample_std(e) / std::sqrt(static_cast<double>(e.size())) : 0.0;
  return out;
}

StationaryStrategy dirichlet_mixture(const GameModel& model, int player, std::mt19937_64& rng) {
  std::exponential_distribution<double> expo(1.0);
  std::vector<std::vector<double>> w(model.num_states());
  for (int i = 0; i < model.num_states(); ++i) {
    const int k = num_actions(model, player, i);
    w[i].resize(k);
    double s = 0.0;
    for (double& x : w[i]) s += (x = expo(rng));
    for (double& x : w[i]) x /= s;
  }
  return StationaryStrategy(std::move(w));
}

// All pure stationary strategies of a player when there are at most `limit`.
std::vector<StationaryStrategy> pure_strategies(const GameModel& model, int player, int limit) {
  const int n = model.num_states();
  double count = 1.0;
  for (int i = 0; i < n; ++i) count *= num_actions(model, player, i);
  std::vector<StationaryStrategy> out;
  if (count > limit) return out;
  std::vector<int> choice(n, 0);
  for (;;) {
    out.push_back(StationaryStrategy::pure(model, player, choice));
    int i = 0;
    while (i < n && ++choice[i] == num_actions(model, player, i)) choice[i++] = 0;
    if (i == n) break;
  }
  return out;
}

}  // namespace

std::string PathBatch::csv() const {
  std::ostringstream os;
  os.precision(17);
  os << "path,step,state,u,v,cost\n";
  for (long p = 0; p < paths; ++p) {
    for (long t = 0; t < horizon; ++t) {
      const std::size_t k = static_cast<std::size_t>(p) * horizon + t;
      os << p << ',' << t << ',' << state[k] << ',' << u[k] << ',' << v[k] << ',' << cost[k] << '\n';
    }
  }
  return os.str();
}

void PathBatch::write_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write " + path);
  out << csv();
}

PathBatch simulate_paths(const GameModel& model, const StationaryStrategy& pi1,
                         const StationaryStrategy& pi2, const SimConfig& cfg) {
  check_config(model, cfg);
  const Sampler sampler(model, pi1, pi2, cfg.deviation, cfg.absorb_exit);
  PathBatch b;
  b.horizon = cfg.horizon;
  b.paths = cfg.paths;
  const std::size_t total = static_cast<std::size_t>(cfg.horizon) * cfg.paths;
  b.state.assign(total, -1);
  b.u.assign(total, -1);
  b.v.assign(total, -1);
  b.cost.assign(total, 0.0);
  b.total.assign(cfg.paths, 0.0);
  for_paths(cfg.paths, cfg.parallel, [&](long p) {
    PathRng rng(cfg.seed, p);
    int x = cfg.start;
    double s = 0.0;
    for (long t = 0; t < cfg.horizon; ++t) {
      const std::size_t k = static_cast<std::size_t>(p) * cfg.horizon + t;
      if (x < 0) break;
      b.state[k] = x;
      b.cost[k] = sampler.cost(x);
      s += b.cost[k];
      x = sampler.step(x, rng, &b.u[k], &b.v[k]);
    }
    b.total[p] = x < 0 ? kNegInf : s;
  });
  return b;
}

EstimatorReport estimate_ergodic_cost(const GameModel& model, const StationaryStrategy& pi1,
                                      const StationaryStrategy& pi2, const SimConfig& cfg) {
  check_config(model, cfg);
  const Sampler sampler(model, pi1, pi2, cfg.deviation, cfg.absorb_exit);
  const long n = cfg.paths;
  std::vector<double> s(n);
  if (cfg.proposal_log_psi.empty()) {
    for_paths(n, cfg.parallel, [&](long p) {
      PathRng rng(cfg.seed, p);
      int x = cfg.start;
      double sum = 0.0;
      for (long t = 0; t < cfg.horizon && x >= 0; ++t) {
        sum += sampler.cost(x);
        x = sampler.step(x, rng);
      }
      s[p] = x < 0 ? kNegInf : sum;
    });
  } else {
    const Tilt tilt(model, cfg.proposal_log_psi);
    for_paths(n, cfg.parallel, [&](long p) {
      PathRng rng(cfg.seed, p);
      int x = cfg.start;
      double sum = 0.0;
      for (long t = 0; t < cfg.horizon && x >= 0; ++t) {
        const int u = sampler.draw_u(x, rng);
        const int v = sampler.draw_v(x, rng);
        sum += sampler.cost(x);
        x = tilt.step(model.pair_index(x, u, v), rng, sum);
      }
      s[p] = x < 0 ? kNegInf : sum;
    });
  }

  EstimatorReport r;
  r.horizon = cfg.horizon;
  r.paths = n;
  r.seed = cfg.seed;
  r.start = cfg.start;
  r.max_exponent = kNegInf;
  r.min_exponent = std::numeric_limits<double>::infinity();
  for (double x : s) {
    if (x == kNegInf) {
      ++r.killed;
      continue;
    }
    r.max_exponent = std::max(r.max_exponent, x);
    r.min_exponent = std::min(r.min_exponent, x);
  }
  r.shift_applied = std::max(std::abs(r.max_exponent), std::abs(r.min_exponent)) > 700.0;
  const double inv_t = 1.0 / static_cast<double>(cfg.horizon);
  // log-mean-exp with the shift kept outside so constant exponents come back exactly.
  auto log_mean = [&](std::size_t lo, std::size_t hi) {
    const auto [m, l] = lse_parts(s, lo, hi);
    if (m == kNegInf) return kNegInf;
    return inv_t * (m + (l - std::log(static_cast<double>(hi - lo))));
  };
  r.estimate = log_mean(0, n);

  r.batches = static_cast<long>(std::floor(std::sqrt(static_cast<double>(n))));
  if (r.batches >= 2) {
    const long size = n / r.batches;
    std::vector<double> est(r.batches);
    for (long b = 0; b < r.batches; ++b) {
      const std::size_t lo = static_cast<std::size_t>(b) * size;
      const std::size_t hi = b + 1 == r.batches ? n : lo + size;
      est[b] = log_mean(lo, hi);
    }
    const bool finite = std::all_of(est.begin(), est.end(), [](double x) { return std::isfinite(x); });
    r.spread = finite ? sample_std(est) / std::sqrt(static_cast<double>(r.batches))
                      : std::numeric_limits<double>::infinity();
  } else {
    r.spread = r.min_exponent == r.max_exponent ? 0.0 : std::numeric_limits<double>::infinity();
  }
  return r;
}

SaddleVerdict verify_saddle(const GameModel& model, const StationaryStrategy& pi1,
                            const StationaryStrategy& pi2, double rho_star, const SimConfig& cfg,
                            int deviations, const std::vector<double>& log_psi) {
  SaddleVerdict verdict;
  verdict.rho_star = rho_star;
  SimConfig base_cfg = cfg;
  base_cfg.deviation.reset();
  if (!log_psi.empty()) {
    double lo = std::numeric_limits<double>::infinity(), hi = kNegInf;
    for (double x : log_psi) {
      if (!std::isfinite(x)) continue;
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
    if (hi >= lo) verdict.horizon_allowance = (hi - lo) / static_cast<double>(cfg.horizon);
    if (base_cfg.proposal_log_psi.empty()) base_cfg.proposal_log_psi = log_psi;
  }
  // Numeric floor for zero-spread instances plus the finite-horizon term.
  const double floor = 1e-9 * (1.0 + std::abs(rho_star)) + verdict.horizon_allowance;
  verdict.base = estimate_ergodic_cost(model, pi1, pi2, base_cfg);
  verdict.base_pass =
      std::abs(verdict.base.estimate - rho_star) <= 3.0 * verdict.base.spread + floor;
  verdict.pass = verdict.base_pass;

  std::mt19937_64 rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
  for (int player : {1, 2}) {
    std::vector<std::pair<std::string, StationaryStrategy>> candidates;
    for (auto& s : pure_strategies(model, player, deviations)) candidates.emplace_back("pure", std::move(s));
    while (static_cast<int>(candidates.size()) < deviations)
      candidates.emplace_back("mixture", dirichlet_mixture(model, player, rng));
    for (auto& [kind, strat] : candidates) {
      // Skip deviations that coincide with the selector itself.
      if (strat == (player == 1 ? pi1 : pi2)) continue;
      DeviationResult d;
      d.player = player;
      d.kind = kind;
      d.strategy = strat;
      SimConfig c = base_cfg;
      c.deviation = DeviationSpec{player, {}, strat};
      d.report = estimate_ergodic_cost(model, pi1, pi2, c);
      const double band = 3.0 * d.report.spread + floor;
      d.pass = player == 2 ? d.report.estimate <= rho_star + band : d.report.estimate >= rho_star - band;
      verdict.pass = verdict.pass && d.pass;
      verdict.deviations.push_back(std::move(d));
    }
  }
  return verdict;
}

SaddleVerdict verify_saddle(const GameModel& model, const SolveReport& report, const SimConfig& cfg,
                            int deviations, bool tilted) {
  return verify_saddle(model, report.selectors.p1, report.selectors.p2, report.rho_star, cfg,
                       deviations, tilted ? report.log_psi_star : std::vector<double>{});
}

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::pass:
      return "PASS";
    case Verdict::fail:
      return "FAIL";
    default:
      return "INCONCLUSIVE";
  }
}

namespace {

struct PairSplit {
  double log_enter = kNegInf;
  double log_stay = kNegInf;
  std::vector<int> next;
  std::vector<double> cum;
};

// Paths stop once the remaining contribution is below e^-40 of the total.
constexpr double kTruncateGap = 40.0;

}  // namespace

RepresentationVerdict verify_stochastic_representation(
    const GameModel& model, const StationaryStrategy& pi1, const StationaryStrategy& pi2,
    double rho_star, const std::vector<double>& log_psi, const std::vector<int>& target,
    const std::vector<int>& starts, const SimConfig& cfg, long cap, bool conditional) {
  if (static_cast<int>(log_psi.size()) != model.num_states())
    throw InvalidArgument("log_psi needs one entry per state");
  if (cfg.paths < 1) throw InvalidArgument("path count N must be >= 1");
  const int n = model.num_states();
  std::vector<char> in_b(n, 0);
  for (int b : target) {
    if (b < 0 || b >= n) throw InvalidArgument("target state out of range");
    in_b[b] = 1;
  }
  const Sampler sampler(model, pi1, pi2, cfg.deviation, cfg.absorb_exit);
  // Conditional mode, per action pair: log of the psi-weighted mass entering
  // B, log of the mass staying outside B on the domain, and the conditional
  // law of the latter. Entries into B are added in closed form at every step;
  // mass leaving the domain has psi = 0 and drops out.
  std::vector<PairSplit> split(conditional ? model.num_pairs() : 0);
  double log_psi_max = kNegInf;
  for (int i = 0; conditional && i < n; ++i) {
    if (!in_b[i]) log_psi_max = std::max(log_psi_max, log_psi[i]);
    for (int u = 0; u < model.num_p1(i); ++u) {
      for (int v = 0; v < model.num_p2(i); ++v) {
        PairSplit& ps = split[model.pair_index(i, u, v)];
        std::vector<double> enter, stay;
        for (const auto& t : model.row(i, u, v)) {
          if (t.log_prob == kNegInf || log_psi[t.next] == kNegInf) continue;
          if (in_b[t.next]) {
            enter.push_back(t.log_prob + log_psi[t.next]);
          } else {
            stay.push_back(t.log_prob);
            ps.next.push_back(t.next);
          }
        }
        ps.log_enter = log_sum_exp(enter);
        ps.log_stay = log_sum_exp(stay);
        double c = 0.0;
        for (double ls : stay) ps.cum.push_back(c += std::exp(ls - ps.log_stay));
      }
    }
  }
  RepresentationVerdict out;
  out.target = target;
  out.verdict = Verdict::pass;
  for (std::size_t s = 0; s < starts.size(); ++s) {
    const int start = starts[s];
    if (start < 0 || start >= n) throw InvalidArgument("start state out of range");
    if (in_b[start]) throw InvalidArgument("start state " + std::to_string(start) + " lies in B");
    std::vector<double> value(cfg.paths);
    std::vector<char> capped(cfg.paths, 0);
    // Streams keyed by start too, so starts do not share paths.
    const std::uint64_t seed = cfg.seed + 0x100000001b3ULL * (s + 1);
    if (conditional) {
      for_paths(cfg.paths, cfg.parallel, [&](long p) {
        PathRng rng(seed, p);
        int x = start;
        double l = 0.0, acc = kNegInf;
        for (long t = 0;; ++t) {
          if (t == cap) {
            capped[p] = 1;
            break;
          }
          const int u = sampler.draw_u(x, rng);
          const int v = sampler.draw_v(x, rng);
          const PairSplit& ps = split[model.pair_index(x, u, v)];
          l += sampler.cost(x) - rho_star;
          acc = log_add_exp(acc, l + ps.log_enter);
          if (ps.log_stay == kNegInf) break;
          l += ps.log_stay;
          // Whatever is left is worth at most e^l * max psi.
          if (l + log_psi_max < acc - kTruncateGap) break;
          x = ps.next[categorical(ps.cum, rng.uniform())];
        }
        value[p] = acc;
      });
    } else {
      for_paths(cfg.paths, cfg.parallel, [&](long p) {
        PathRng rng(seed, p);
        int x = start;
        double l = 0.0;
        for (long t = 0;; ++t) {
          if (t > 0 && x >= 0 && in_b[x]) {
            value[p] = l + log_psi[x];
            return;
          }
          if (x < 0) {
            value[p] = kNegInf;
            return;
          }
          if (t == cap) {
            capped[p] = 1;
            value[p] = kNegInf;
            return;
          }
          l += sampler.cost(x) - rho_star;
          x = sampler.step(x, rng);
        }
      });
    }
    RepresentationState st;
    st.start = start;
    st.psi = std::exp(log_psi[start]);
    std::vector<double> kept;
    kept.reserve(cfg.paths);
    for (long p = 0; p < cfg.paths; ++p) {
      if (capped[p]) {
        ++st.capped;
        continue;
      }
      if (value[p] == kNegInf) ++st.killed;
      kept.push_back(value[p]);
    }
    const MeanEstimate m = exp_mean(kept);
    st.estimate = m.mean;
    st.spread = m.spread;
    if (static_cast<double>(st.capped) > 0.01 * static_cast<double>(cfg.paths))
      st.verdict = Verdict::inconclusive;
    else
      st.verdict = std::abs(st.estimate - st.psi) <= 3.0 * st.spread + 1e-12 * st.psi ? Verdict::pass
                                                                                       : Verdict::fail;
    if (st.verdict == Verdict::fail)
      out.verdict = Verdict::fail;
    else if (st.verdict == Verdict::inconclusive && out.verdict == Verdict::pass)
      out.verdict = Verdict::inconclusive;
    out.states.push_back(st);
  }
  return out;
}

RepresentationVerdict verify_stochastic_representation(const GameModel& model,
                                                       const SolveReport& report,
                                                       const std::vector<int>& target,
                                                       const std::vector<int>& starts,
                                                       const SimConfig& cfg, long cap,
                                                       bool conditional) {
  return verify_stochastic_representation(model, report.selectors.p1, report.selectors.p2,
                                          report.rho_star, report.log_psi_star, target, starts, cfg,
                                          cap, conditional);
}

MeanEstimate estimate_exit_sum(const GameModel& model, const StationaryStrategy& pi1,
                               const StationaryStrategy& pi2, const std::vector<double>& cbar,
                               const std::vector<double>& g, const std::vector<int>& domain,
                               const SimConfig& cfg, long cap) {
  if (cbar.size() != model.num_pairs()) throw InvalidArgument("cbar needs one entry per action pair");
  const int n = model.num_states();
  std::vector<char> in_d(n, 0);
  for (int i : domain) in_d.at(i) = 1;
  // Mixed cbar per state under the pair.
  std::vector<double> mixed(n, 0.0);
  for (int i = 0; i < n; ++i) {
    const auto mu = pi1.at(i), nu = pi2.at(i);
    for (int u = 0; u < model.num_p1(i); ++u)
      for (int v = 0; v < model.num_p2(i); ++v) mixed[i] += mu[u] * nu[v] * cbar[model.pair_index(i, u, v)];
  }
  const Sampler sampler(model, pi1, pi2, cfg.deviation, true);
  std::vector<double> value(cfg.paths);
  for_paths(cfg.paths, cfg.parallel, [&](long p) {
    PathRng rng(cfg.seed, p);
    int x = cfg.start;
    double w = 0.0, sum = 0.0;
    for (long t = 0; t < cap && x >= 0 && in_d[x]; ++t) {
      sum += std::exp(w) * g[x];
      w += mixed[x];
      x = sampler.step(x, rng);
    }
    value[p] = sum;
  });
  MeanEstimate out;
  out.mean = pairwise_sum(value.data(), value.size()) / static_cast<double>(cfg.paths);
  out.spread = cfg.paths > 1 ? sample_std(value) / std::sqrt(static_cast<double>(cfg.paths)) : 0.0;
  return out;
}

}  // namespace rsgame
