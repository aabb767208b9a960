#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rsgame/model.hpp"

namespace rsgame {

inline constexpr double kRowSumTol = 1e-12;
inline constexpr double kLyapunovSlackTol = 1e-14;

struct Violation {
  std::string kind;  // e.g. "row_sum", "negative_cost"
  int i = -1, u = -1, v = -1, j = -1;
  double value = 0.0;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
};

/// Lists every broken well-formedness invariant of the model. Never throws.
ValidationReport validate_model(const GameModel& model);

/// Problems with a stationary strategy for `player` (1 or 2) on this model.
std::vector<std::string> validate_strategy(const GameModel& model, int player,
                                           const StationaryStrategy& strategy);

struct LyapunovStateResult {
  int state = 0;
  // log(rhs) - log(lhs) at the worst (u, v); >= -kLyapunovSlackTol passes.
  double worst_log_slack = 0.0;
  int worst_u = 0, worst_v = 0;
  bool pass = true;
};

/// Finite-window surrogate of "f is norm-like": f is nondecreasing from
/// tail_start to the window edge, strictly grows on that tail, and the tail
/// end dominates every earlier value (sublevel sets stay inside the window).
struct NormLikeResult {
  std::vector<double> values;
  int tail_start = 0;
  bool pass = false;
};

NormLikeResult check_norm_like(const std::vector<double>& f);

struct LyapunovReport {
  bool bounded_case = false;
  std::vector<LyapunovStateResult> states;
  bool drift_pass = true;
  double worst_log_slack = 0.0;
  int worst_state = -1;
  // Unbounded case: l(i) - max_{u,v} c(i,u,v). Bounded case: gamma > max c.
  std::optional<NormLikeResult> norm_like;
  bool cost_bound_pass = true;
  bool pass = false;
};

/// Drift inequality sum_j W(j) P(j|i,u,v) <= C 1_K(i) + e^{-l(i)} W(i) (or
/// e^{-gamma}) at every window state and pure pair, evaluated in log domain.
/// Throws MissingLyapunovData when the model carries no lyapunov block.
LyapunovReport check_lyapunov(const GameModel& model);

enum class IrreducibilityMode { sufficient, sampled };

struct IrreducibilityReport {
  IrreducibilityMode mode = IrreducibilityMode::sufficient;
  bool pass = false;
  std::string guarantee;
  int samples = 0;
  // Sampled mode: the first pure stationary pair whose support graph is not
  // strongly connected.
  std::optional<std::vector<int>> failing_p1;
  std::optional<std::vector<int>> failing_p2;
};

IrreducibilityReport check_irreducibility(const GameModel& model, IrreducibilityMode mode,
                                          int samples = 200, std::uint64_t seed = 1);

/// True iff every pure pair at i0 puts positive mass on every other state.
bool check_reference_state(const GameModel& model);

/// Strong connectivity of a directed graph given as adjacency lists.
bool strongly_connected(const std::vector<std::vector<int>>& adjacency);

}  // namespace rsgame
