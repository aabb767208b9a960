#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace rsgame {

/// One nonzero of a transition row: mass `prob` moved to state `next`.
/// log_prob is kept separately so masses below the double range (such as
/// e^{-j^2/3}) stay positive.
struct Transition {
  int next;
  double prob;
  double log_prob;
};

/// Drift-condition data attached to a model. W is held as log W because the
/// functions of interest grow like e^{i^2}.
struct LyapunovData {
  std::vector<double> log_w;
  std::optional<double> gamma;  // bounded-cost case
  std::vector<double> ell;      // unbounded-cost case, one entry per state
  std::vector<int> small_set;   // finite set K
  double c_const = 1.0;         // constant C > 0

  bool bounded_case() const { return gamma.has_value(); }
  bool in_small_set(int i) const;
};

/// Finite-window representation of the countable-state game. Immutable once
/// built; construct through GameModel::Builder.
///
/// Costs are stored twice: as supplied and multiplied by theta. Every solver
/// reads the scaled tensor, so a model built from (theta, c) and one built from
/// (1, theta * c) are numerically the same game.
class GameModel {
 public:
  class Builder;

  int num_states() const { return static_cast<int>(actions_p1_.size()); }
  int num_p1(int i) const { return static_cast<int>(actions_p1_[i].size()); }
  int num_p2(int i) const { return static_cast<int>(actions_p2_[i].size()); }
  const std::vector<std::string>& actions_p1(int i) const { return actions_p1_[i]; }
  const std::vector<std::string>& actions_p2(int i) const { return actions_p2_[i]; }

  /// Flat index of the pure action pair (u, v) at state i.
  std::size_t pair_index(int i, int u, int v) const {
    return pair_base_[i] + static_cast<std::size_t>(u) * actions_p2_[i].size() + v;
  }
  std::size_t num_pairs() const { return pair_base_.back(); }

  /// Nonzeros of P(. | i, u, v), sorted by next state.
  std::span<const Transition> row(int i, int u, int v) const {
    const std::size_t p = pair_index(i, u, v);
    return {entries_.data() + row_ptr_[p], entries_.data() + row_ptr_[p + 1]};
  }
  double probability(int i, int u, int v, int j) const;
  /// 1 - sum_j P(j | i, u, v); positive when mass leaves the window.
  double exit_mass(int i, int u, int v) const;

  /// theta * c(i, u, v)
  double cost(int i, int u, int v) const { return cost_[pair_index(i, u, v)]; }
  double raw_cost(int i, int u, int v) const { return raw_cost_[pair_index(i, u, v)]; }
  std::span<const double> scaled_costs() const { return cost_; }

  double theta() const { return theta_; }
  int i0() const { return i0_; }
  bool declared_closed() const { return closed_; }
  const std::optional<LyapunovData>& lyapunov() const { return lyapunov_; }

  bool uncontrolled() const;
  /// Largest exit mass over all (i, u, v).
  double max_exit_mass() const;

 private:
  GameModel() = default;

  std::vector<std::vector<std::string>> actions_p1_;
  std::vector<std::vector<std::string>> actions_p2_;
  std::vector<std::size_t> pair_base_;  // size num_states + 1
  std::vector<std::size_t> row_ptr_;    // size num_pairs + 1
  std::vector<Transition> entries_;
  std::vector<double> raw_cost_;
  std::vector<double> cost_;
  double theta_ = 1.0;
  int i0_ = 0;
  bool closed_ = true;
  std::optional<LyapunovData> lyapunov_;
};

/// Accumulates model data. Structural problems (indices out of range, actions
/// not declared before transitions) throw IngestError; value problems
/// (negative mass, bad row sums, negative cost) are accepted and left for
/// validate_model to report.
class GameModel::Builder {
 public:
  explicit Builder(int num_states);

  Builder& set_actions(int i, std::vector<std::string> p1, std::vector<std::string> p2);
  /// Adds mass p to P(j | i, u, v); repeated records accumulate.
  Builder& add_transition(int i, int u, int v, int j, double p);
  /// Same with the mass given as log p.
  Builder& add_transition_log(int i, int u, int v, int j, double log_p);
  Builder& set_cost(int i, int u, int v, double c);
  Builder& set_theta(double theta);
  Builder& set_i0(int i0);
  Builder& set_closed(bool closed);
  Builder& set_lyapunov(LyapunovData data);

  GameModel build() &&;

 private:
  struct Record {
    int i, u, v, j;
    double p, log_p;
  };
  struct CostRecord {
    int i, u, v;
    double c;
  };
  void check_state(int i, const char* what) const;
  void check_pair(int i, int u, int v) const;

  int num_states_;
  std::vector<std::vector<std::string>> p1_, p2_;
  std::vector<Record> transitions_;
  std::vector<CostRecord> costs_;
  double theta_ = 1.0;
  int i0_ = 0;
  bool closed_ = true;
  std::optional<LyapunovData> lyapunov_;
};

/// Per-state mixed action rule for one player.
class StationaryStrategy {
 public:
  StationaryStrategy() = default;
  explicit StationaryStrategy(std::vector<std::vector<double>> weights)
      : weights_(std::move(weights)) {}

  static StationaryStrategy uniform(const GameModel& model, int player);
  /// Point masses on choice[i].
  static StationaryStrategy pure(const GameModel& model, int player, std::span<const int> choice);

  int num_states() const { return static_cast<int>(weights_.size()); }
  std::span<const double> at(int i) const { return weights_[i]; }
  std::vector<double>& mutable_at(int i) { return weights_[i]; }
  const std::vector<std::vector<double>>& weights() const { return weights_; }

  bool operator==(const StationaryStrategy&) const = default;

 private:
  std::vector<std::vector<double>> weights_;
};

/// Number of actions available to `player` (1 or 2) at state i.
int num_actions(const GameModel& model, int player, int i);

}  // namespace rsgame
