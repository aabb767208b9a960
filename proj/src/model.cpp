#include "rsgame/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rsgame/errors.hpp"
#include "rsgame/logmath.hpp"

namespace rsgame {

bool LyapunovData::in_small_set(int i) const {
  return std::find(small_set.begin(), small_set.end(), i) != small_set.end();
}

double GameModel::probability(int i, int u, int v, int j) const {
  for (const auto& t : row(i, u, v)) {
    if (t.next == j) return t.prob;
  }
  return 0.0;
}

double GameModel::exit_mass(int i, int u, int v) const {
  double s = 0.0;
  for (const auto& t : row(i, u, v)) s += t.prob;
  return 1.0 - s;
}

bool GameModel::uncontrolled() const {
  for (int i = 0; i < num_states(); ++i) {
    if (num_p1(i) != 1 || num_p2(i) != 1) return false;
  }
  return true;
}

double GameModel::max_exit_mass() const {
  double worst = 0.0;
  for (int i = 0; i < num_states(); ++i)
    for (int u = 0; u < num_p1(i); ++u)
      for (int v = 0; v < num_p2(i); ++v) worst = std::max(worst, exit_mass(i, u, v));
  return worst;
}

GameModel::Builder::Builder(int num_states) : num_states_(num_states) {
  if (num_states < 1) throw IngestError("model needs at least one state");
  p1_.resize(num_states);
  p2_.resize(num_states);
}

void GameModel::Builder::check_state(int i, const char* what) const {
  if (i < 0 || i >= num_states_)
    throw IngestError(std::string(what) + " index " + std::to_string(i) + " out of range [0," +
                      std::to_string(num_states_) + ")");
}

void GameModel::Builder::check_pair(int i, int u, int v) const {
  check_state(i, "state");
  if (u < 0 || u >= static_cast<int>(p1_[i].size()))
    throw IngestError("player-1 action " + std::to_string(u) + " undefined at state " +
                      std::to_string(i));
  if (v < 0 || v >= static_cast<int>(p2_[i].size()))
    throw IngestError("player-2 action " + std::to_string(v) + " undefined at state " +
                      std::to_string(i));
}

GameModel::Builder& GameModel::Builder::set_actions(int i, std::vector<std::string> p1,
                                                    std::vector<std::string> p2) {
  check_state(i, "state");
  p1_[i] = std::move(p1);
  p2_[i] = std::move(p2);
  return *this;
}

GameModel::Builder& GameModel::Builder::add_transition(int i, int u, int v, int j, double p) {
  check_pair(i, u, v);
  check_state(j, "next state");
  transitions_.push_back({i, u, v, j, p, p > 0.0 ? std::log(p) : -INFINITY});
  return *this;
}

GameModel::Builder& GameModel::Builder::add_transition_log(int i, int u, int v, int j, double log_p) {
  check_pair(i, u, v);
  check_state(j, "next state");
  transitions_.push_back({i, u, v, j, std::exp(log_p), log_p});
  return *this;
}

GameModel::Builder& GameModel::Builder::set_cost(int i, int u, int v, double c) {
  check_pair(i, u, v);
  costs_.push_back({i, u, v, c});
  return *this;
}

GameModel::Builder& GameModel::Builder::set_theta(double theta) {
  if (!(theta > 0.0)) throw IngestError("theta must be strictly positive");
  theta_ = theta;
  return *this;
}

GameModel::Builder& GameModel::Builder::set_i0(int i0) {
  i0_ = i0;
  return *this;
}

GameModel::Builder& GameModel::Builder::set_closed(bool closed) {
  closed_ = closed;
  return *this;
}

GameModel::Builder& GameModel::Builder::set_lyapunov(LyapunovData data) {
  if (static_cast<int>(data.log_w.size()) != num_states_)
    throw IngestError("lyapunov W must have one entry per state");
  if (!data.gamma && static_cast<int>(data.ell.size()) != num_states_)
    throw IngestError("lyapunov needs gamma or one ell entry per state");
  for (int k : data.small_set) check_state(k, "lyapunov K");
  lyapunov_ = std::move(data);
  return *this;
}

GameModel GameModel::Builder::build() && {
  GameModel m;
  m.actions_p1_ = std::move(p1_);
  m.actions_p2_ = std::move(p2_);
  m.pair_base_.assign(num_states_ + 1, 0);
  for (int i = 0; i < num_states_; ++i)
    m.pair_base_[i + 1] = m.pair_base_[i] + m.actions_p1_[i].size() * m.actions_p2_[i].size();
  const std::size_t pairs = m.pair_base_.back();

  std::stable_sort(transitions_.begin(), transitions_.end(), [&](const Record& a, const Record& b) {
    const auto pa = m.pair_index(a.i, a.u, a.v), pb = m.pair_index(b.i, b.u, b.v);
    return pa != pb ? pa < pb : a.j < b.j;
  });
  m.row_ptr_.assign(pairs + 1, 0);
  // Merge duplicates while filling the CSR arrays.
  std::size_t k = 0;
  for (std::size_t p = 0; p < pairs; ++p) {
    m.row_ptr_[p] = m.entries_.size();
    while (k < transitions_.size() &&
           m.pair_index(transitions_[k].i, transitions_[k].u, transitions_[k].v) == p) {
      const auto& r = transitions_[k];
      if (m.entries_.size() > m.row_ptr_[p] && m.entries_.back().next == r.j) {
        m.entries_.back().prob += r.p;
        m.entries_.back().log_prob = log_add_exp(m.entries_.back().log_prob, r.log_p);
      } else {
        m.entries_.push_back({r.j, r.p, r.log_p});
      }
      ++k;
    }
  }
  m.row_ptr_[pairs] = m.entries_.size();

  m.raw_cost_.assign(pairs, 0.0);
  for (const auto& c : costs_) m.raw_cost_[m.pair_index(c.i, c.u, c.v)] = c.c;
  m.cost_.resize(pairs);
  for (std::size_t p = 0; p < pairs; ++p) m.cost_[p] = theta_ * m.raw_cost_[p];

  m.theta_ = theta_;
  m.i0_ = i0_;
  m.closed_ = closed_;
  m.lyapunov_ = std::move(lyapunov_);
  return m;
}

StationaryStrategy StationaryStrategy::uniform(const GameModel& model, int player) {
  std::vector<std::vector<double>> w(model.num_states());
  for (int i = 0; i < model.num_states(); ++i) {
    const int n = num_actions(model, player, i);
    w[i].assign(n, 1.0 / n);
  }
  return StationaryStrategy(std::move(w));
}

StationaryStrategy StationaryStrategy::pure(const GameModel& model, int player,
                                            std::span<const int> choice) {
  std::vector<std::vector<double>> w(model.num_states());
  for (int i = 0; i < model.num_states(); ++i) {
    w[i].assign(num_actions(model, player, i), 0.0);
    w[i][choice[i]] = 1.0;
  }
  return StationaryStrategy(std::move(w));
}

int num_actions(const GameModel& model, int player, int i) {
  return player == 1 ? model.num_p1(i) : model.num_p2(i);
}

}  // namespace rsgame
