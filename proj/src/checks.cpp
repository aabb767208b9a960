#include "rsgame/checks.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <random>
#include <sstream>

#include "rsgame/errors.hpp"
#include "rsgame/logmath.hpp"

namespace rsgame {
namespace {

std::string pair_text(int i, int u, int v) {
  std::ostringstream os;
  os << "(i=" << i << ", u=" << u << ", v=" << v << ")";
  return os.str();
}

bool reaches_all(const std::vector<std::vector<int>>& adj) {
  const int n = static_cast<int>(adj.size());
  std::vector<char> seen(n, 0);
  std::queue<int> q;
  q.push(0);
  seen[0] = 1;
  int count = 1;
  while (!q.empty()) {
    const int i = q.front();
    q.pop();
    for (int j : adj[i]) {
      if (!seen[j]) {
        seen[j] = 1;
        ++count;
        q.push(j);
      }
    }
  }
  return count == n;
}

}  // namespace

ValidationReport validate_model(const GameModel& model) {
  ValidationReport report;
  auto add = [&](std::string kind, int i, int u, int v, int j, double value, std::string msg) {
    report.violations.push_back({std::move(kind), i, u, v, j, value, std::move(msg)});
  };
  const int n = model.num_states();
  if (model.i0() < 0 || model.i0() >= n)
    add("i0", -1, -1, -1, -1, model.i0(), "reference state is not a window state");

  for (int i = 0; i < n; ++i) {
    if (model.num_p1(i) == 0) add("empty_actions", i, -1, -1, -1, 0, "player 1 has no action");
    if (model.num_p2(i) == 0) add("empty_actions", i, -1, -1, -1, 0, "player 2 has no action");
    for (int u = 0; u < model.num_p1(i); ++u) {
      for (int v = 0; v < model.num_p2(i); ++v) {
        double sum = 0.0;
        for (const auto& t : model.row(i, u, v)) {
          if (!(t.prob >= 0.0) || !std::isfinite(t.prob))
            add("negative_probability", i, u, v, t.next, t.prob,
                "P(j|" + pair_text(i, u, v) + ") is negative or not finite");
          sum += t.prob;
        }
        if (sum > 1.0 + kRowSumTol)
          add("row_sum", i, u, v, -1, sum, "row " + pair_text(i, u, v) + " sums above 1");
        else if (model.declared_closed() && std::abs(sum - 1.0) > kRowSumTol)
          add("row_sum", i, u, v, -1, sum,
              "row " + pair_text(i, u, v) + " of a closed model does not sum to 1");
        const double c = model.raw_cost(i, u, v);
        if (!(c >= 0.0) || !std::isfinite(c))
          add("negative_cost", i, u, v, -1, c,
              "cost at " + pair_text(i, u, v) + " is negative or not finite");
      }
    }
  }

  if (const auto& ly = model.lyapunov()) {
    for (int i = 0; i < n; ++i) {
      if (!(ly->log_w[i] >= 0.0))
        add("lyapunov_w", i, -1, -1, -1, ly->log_w[i], "W(i) < 1");
      if (!ly->bounded_case() && !(ly->ell[i] >= 0.0))
        add("lyapunov_ell", i, -1, -1, -1, ly->ell[i], "ell(i) is negative");
    }
    if (!(ly->c_const > 0.0)) add("lyapunov_c", -1, -1, -1, -1, ly->c_const, "C must be > 0");
    if (ly->bounded_case() && !(*ly->gamma > 0.0))
      add("lyapunov_gamma", -1, -1, -1, -1, *ly->gamma, "gamma must be > 0");
  }
  return report;
}

std::vector<std::string> validate_strategy(const GameModel& model, int player,
                                           const StationaryStrategy& strategy) {
  std::vector<std::string> problems;
  if (strategy.num_states() != model.num_states()) {
    problems.push_back("strategy covers " + std::to_string(strategy.num_states()) +
                       " states, model has " + std::to_string(model.num_states()));
    return problems;
  }
  for (int i = 0; i < model.num_states(); ++i) {
    const auto w = strategy.at(i);
    if (static_cast<int>(w.size()) != num_actions(model, player, i)) {
      problems.push_back("state " + std::to_string(i) + ": weight count does not match actions");
      continue;
    }
    double sum = 0.0;
    for (double x : w) {
      if (!(x >= 0.0)) problems.push_back("state " + std::to_string(i) + ": negative weight");
      sum += x;
    }
    if (std::abs(sum - 1.0) > kRowSumTol)
      problems.push_back("state " + std::to_string(i) + ": weights sum to " + std::to_string(sum));
  }
  return problems;
}

NormLikeResult check_norm_like(const std::vector<double>& f) {
  NormLikeResult r;
  r.values = f;
  const int n = static_cast<int>(f.size());
  if (n <= 1) {
    r.pass = true;
    return r;
  }
  int k = n - 1;
  while (k > 0 && f[k - 1] < f[k]) --k;
  r.tail_start = k;
  const int tail = n - k;
  const double top = *std::max_element(f.begin(), f.end());
  r.pass = tail >= std::max(2, (n + 1) / 2) && f[n - 1] >= top;
  return r;
}

LyapunovReport check_lyapunov(const GameModel& model) {
  const auto& ly = model.lyapunov();
  if (!ly) throw MissingLyapunovData();
  LyapunovReport report;
  report.bounded_case = ly->bounded_case();
  const int n = model.num_states();
  const double log_c = std::log(ly->c_const);
  std::vector<double> terms;
  double max_cost_all = kNegInf;
  std::vector<double> gap(n);

  for (int i = 0; i < n; ++i) {
    LyapunovStateResult s;
    s.state = i;
    s.worst_log_slack = std::numeric_limits<double>::infinity();
    const double decay = report.bounded_case ? *ly->gamma : ly->ell[i];
    const double rhs = log_add_exp(ly->in_small_set(i) ? log_c : kNegInf, ly->log_w[i] - decay);
    double max_c = kNegInf;
    for (int u = 0; u < model.num_p1(i); ++u) {
      for (int v = 0; v < model.num_p2(i); ++v) {
        terms.clear();
        for (const auto& t : model.row(i, u, v))
          terms.push_back(ly->log_w[t.next] + t.log_prob);
        const double lhs = log_sum_exp(terms);
        const double slack = lhs == kNegInf ? std::numeric_limits<double>::infinity() : rhs - lhs;
        if (slack < s.worst_log_slack) {
          s.worst_log_slack = slack;
          s.worst_u = u;
          s.worst_v = v;
        }
        max_c = std::max(max_c, model.cost(i, u, v));
      }
    }
    s.pass = s.worst_log_slack >= -kLyapunovSlackTol;
    if (!s.pass) report.drift_pass = false;
    if (report.worst_state < 0 || s.worst_log_slack < report.worst_log_slack) {
      report.worst_log_slack = s.worst_log_slack;
      report.worst_state = i;
    }
    report.states.push_back(s);
    max_cost_all = std::max(max_cost_all, max_c);
    if (!report.bounded_case) gap[i] = ly->ell[i] - max_c;
  }

  if (report.bounded_case) {
    report.cost_bound_pass = *ly->gamma > max_cost_all;
  } else {
    report.norm_like = check_norm_like(gap);
  }
  report.pass = report.drift_pass && report.cost_bound_pass &&
                (!report.norm_like || report.norm_like->pass);
  return report;
}

bool strongly_connected(const std::vector<std::vector<int>>& adjacency) {
  const int n = static_cast<int>(adjacency.size());
  if (n <= 1) return true;
  std::vector<std::vector<int>> reverse(n);
  for (int i = 0; i < n; ++i)
    for (int j : adjacency[i]) reverse[j].push_back(i);
  return reaches_all(adjacency) && reaches_all(reverse);
}

IrreducibilityReport check_irreducibility(const GameModel& model, IrreducibilityMode mode,
                                          int samples, std::uint64_t seed) {
  IrreducibilityReport report;
  report.mode = mode;
  const int n = model.num_states();

  if (mode == IrreducibilityMode::sufficient) {
    std::vector<std::vector<int>> adj(n);
    std::vector<int> hits(n);
    bool actions_ok = true;
    for (int i = 0; i < n; ++i) {
      const int pairs = model.num_p1(i) * model.num_p2(i);
      if (pairs == 0) {
        actions_ok = false;
        continue;
      }
      std::fill(hits.begin(), hits.end(), 0);
      for (int u = 0; u < model.num_p1(i); ++u)
        for (int v = 0; v < model.num_p2(i); ++v)
          for (const auto& t : model.row(i, u, v))
            if (t.log_prob > kNegInf) ++hits[t.next];
      for (int j = 0; j < n; ++j)
        if (hits[j] == pairs) adj[i].push_back(j);
    }
    report.pass = actions_ok && strongly_connected(adj);
    report.guarantee = report.pass
                           ? "irreducible under every stationary strategy pair (min-support graph "
                             "is strongly connected)"
                           : "sufficient condition not met; no guarantee either way";
    return report;
  }

  report.samples = samples;
  std::mt19937_64 rng(seed);
  std::vector<int> c1(n), c2(n);
  for (int s = 0; s < samples; ++s) {
    std::vector<std::vector<int>> adj(n);
    for (int i = 0; i < n; ++i) {
      if (model.num_p1(i) == 0 || model.num_p2(i) == 0) {
        report.pass = false;
        report.guarantee = "falsified: state " + std::to_string(i) + " has an empty action set";
        return report;
      }
      c1[i] = std::uniform_int_distribution<int>(0, model.num_p1(i) - 1)(rng);
      c2[i] = std::uniform_int_distribution<int>(0, model.num_p2(i) - 1)(rng);
      for (const auto& t : model.row(i, c1[i], c2[i]))
        if (t.log_prob > kNegInf) adj[i].push_back(t.next);
    }
    if (!strongly_connected(adj)) {
      report.pass = false;
      report.failing_p1 = c1;
      report.failing_p2 = c2;
      report.guarantee = "falsified: a sampled pure stationary pair gives a reducible chain";
      return report;
    }
  }
  report.pass = true;
  report.guarantee = "no counterexample among " + std::to_string(samples) +
                     " sampled pure stationary pairs (evidence, not a proof)";
  return report;
}

bool check_reference_state(const GameModel& model) {
  const int n = model.num_states();
  const int i0 = model.i0();
  if (i0 < 0 || i0 >= n) return false;
  std::vector<char> hit(n);
  for (int u = 0; u < model.num_p1(i0); ++u) {
    for (int v = 0; v < model.num_p2(i0); ++v) {
      std::fill(hit.begin(), hit.end(), 0);
      for (const auto& t : model.row(i0, u, v))
        if (t.log_prob > kNegInf) hit[t.next] = 1;
      for (int j = 0; j < n; ++j)
        if (j != i0 && !hit[j]) return false;
    }
  }
  return true;
}

}  // namespace rsgame
