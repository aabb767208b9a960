#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rsgame/model.hpp"
#include "rsgame/shapley.hpp"

namespace rsgame {

/// Replaces one player's rule at some states (all states when empty).
struct DeviationSpec {
  int player = 1;
  std::vector<int> states;
  StationaryStrategy replacement;
};

struct SimConfig {
  long horizon = 1000;  // T
  long paths = 1000;    // N
  std::uint64_t seed = 1;
  int start = 0;
  // Paths whose mass leaves the window are killed (weight 0) instead of
  // raising OpenModel.
  bool absorb_exit = false;
  bool parallel = true;
  std::optional<DeviationSpec> deviation;
  // Importance sampling for estimate_ergodic_cost: when set (one log weight
  // per state), next states are drawn with probability proportional to
  // P(j | i, u, v) psi(j) and the likelihood ratio is carried in the
  // exponent. Unbiased for any positive psi; states at -inf use the smallest
  // finite weight.
  std::vector<double> proposal_log_psi;
};

/// N paths of length T. Row k = path * T + step holds X_t, the sampled
/// actions and the mixed cost c(X_t, mu, nu) that enters the exponent.
/// state = -1 marks steps after the path left the window.
struct PathBatch {
  long horizon = 0, paths = 0;
  std::vector<int> state, u, v;
  std::vector<double> cost;
  std::vector<double> total;  // per path, -inf when killed

  void write_csv(const std::string& path) const;
  std::string csv() const;
};

PathBatch simulate_paths(const GameModel& model, const StationaryStrategy& pi1,
                         const StationaryStrategy& pi2, const SimConfig& cfg);

struct EstimatorReport {
  double estimate = 0.0;  // (1/T) log((1/N) sum_paths e^{S_p}), S_p weighted when sampling is tilted
  double spread = 0.0;    // standard error of the batch log estimates
  long batches = 0;
  double max_exponent = 0.0;
  double min_exponent = 0.0;
  bool shift_applied = false;  // some |S_p| exceeded the double exponent range
  long killed = 0;
  long horizon = 0, paths = 0;
  std::uint64_t seed = 0;
  int start = 0;
};

/// Risk-sensitive ergodic cost at horizon T with log-sum-exp over paths and
/// floor(sqrt N) contiguous batches for the spread. Bit-identical for a fixed
/// seed regardless of thread count.
EstimatorReport estimate_ergodic_cost(const GameModel& model, const StationaryStrategy& pi1,
                                      const StationaryStrategy& pi2, const SimConfig& cfg);

struct DeviationResult {
  int player = 1;
  std::string kind;  // "pure" or "mixture"
  StationaryStrategy strategy;
  EstimatorReport report;
  bool pass = false;
};

struct SaddleVerdict {
  bool pass = false;
  double rho_star = 0.0;
  double horizon_allowance = 0.0;  // log(max psi / min psi) / T, 0 without psi
  EstimatorReport base;
  bool base_pass = false;
  std::vector<DeviationResult> deviations;
};

/// J(pi1*, pi2*) within 3 spreads of rho*; every player-2 deviation at most
/// rho* + 3 spreads; every player-1 deviation at least rho* - 3 spreads.
///
/// Tilted mode, selected by passing an eigenfunction log_psi: every run is
/// importance-sampled with psi (unless cfg names a proposal) and the bands
/// widen by the finite-horizon term log(max psi / min psi) / T over the
/// states where psi is finite.
/// `deviations` per player: all pure stationary strategies when they fit in
/// the count, random Dirichlet(1) mixtures for the rest.
SaddleVerdict verify_saddle(const GameModel& model, const StationaryStrategy& pi1,
                            const StationaryStrategy& pi2, double rho_star, const SimConfig& cfg,
                            int deviations, const std::vector<double>& log_psi = {});
SaddleVerdict verify_saddle(const GameModel& model, const SolveReport& report, const SimConfig& cfg,
                            int deviations, bool tilted = false);

enum class Verdict { pass, fail, inconclusive };
const char* verdict_name(Verdict v);

struct RepresentationState {
  int start = 0;
  double psi = 0.0;       // psi*(start)
  double estimate = 0.0;  // E[e^{sum_{t<tau}(c - rho)} psi(X_tau)]
  double spread = 0.0;    // standard error over paths
  long capped = 0;
  long killed = 0;
  Verdict verdict = Verdict::fail;
};

struct RepresentationVerdict {
  Verdict verdict = Verdict::fail;
  std::vector<int> target;
  std::vector<RepresentationState> states;
};

inline constexpr long kHittingCap = 1000000;

/// Monte Carlo check of psi*(i) = E_i[e^{sum_{t<tau(B)} (c - rho*)} psi*(X_tau(B))]
/// under the selector pair, tau(B) the first entry time into B. Uses cfg.paths
/// paths per start and ignores cfg.horizon; paths still outside B after `cap`
/// steps are dropped and counted; `killed` counts paths that left the window
/// or the domain (they contribute 0).
///
/// With `conditional` set the same expectation is estimated by conditional
/// Monte Carlo: the entry into B is summed in closed form at every step and
/// only moves that stay outside B are sampled, so rare late entries are not
/// lost to sampling.
RepresentationVerdict verify_stochastic_representation(
    const GameModel& model, const StationaryStrategy& pi1, const StationaryStrategy& pi2,
    double rho_star, const std::vector<double>& log_psi, const std::vector<int>& target,
    const std::vector<int>& starts, const SimConfig& cfg, long cap = kHittingCap,
    bool conditional = false);
RepresentationVerdict verify_stochastic_representation(const GameModel& model,
                                                       const SolveReport& report,
                                                       const std::vector<int>& target,
                                                       const std::vector<int>& starts,
                                                       const SimConfig& cfg,
                                                       long cap = kHittingCap,
                                                       bool conditional = false);

struct MeanEstimate {
  double mean = 0.0;
  double spread = 0.0;  // standard error
};

/// Monte Carlo value of E_i[sum_{t<tau(D)} e^{sum_{s<t} cbar(X_s)} g(X_t)],
/// tau(D) the first exit from D, under the given pair. cbar is indexed like
/// the model's cost tensor.
MeanEstimate estimate_exit_sum(const GameModel& model, const StationaryStrategy& pi1,
                               const StationaryStrategy& pi2, const std::vector<double>& cbar,
                               const std::vector<double>& g, const std::vector<int>& domain,
                               const SimConfig& cfg, long cap = kHittingCap);

}  // namespace rsgame
