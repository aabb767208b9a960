#pragma once

#include <json.hpp>
#include <span>
#include <string>
#include <vector>

#include "rsgame/model.hpp"

namespace rsgame {

/// Finite subset D of the window with psi = 0 on its complement. Must hold i0.
class DirichletDomain {
 public:
  DirichletDomain(const GameModel& model, std::vector<int> states);
  /// D = {0, ..., n-1}.
  static DirichletDomain prefix(const GameModel& model, int n);

  const GameModel& model() const { return *model_; }
  std::span<const int> states() const { return states_; }
  int size() const { return static_cast<int>(states_.size()); }
  bool contains(int i) const { return i >= 0 && i < static_cast<int>(mask_.size()) && mask_[i]; }
  /// Position of i0 inside states().
  int i0_position() const { return i0_pos_; }

 private:
  const GameModel* model_;
  std::vector<int> states_;
  std::vector<char> mask_;
  int i0_pos_ = 0;
};

/// Principal Dirichlet eigenpair, psi normalized to psi(i0) = 1.
struct EigenPair {
  double rho = 0.0;
  std::vector<double> log_psi;  // one entry per window state, -inf off the domain
  std::vector<int> domain;
  double bracket_lo = 0.0, bracket_hi = 0.0;
  long iterations = 0;
  long damped_steps = 0;
  std::vector<std::string> warnings;

  double bracket_width() const { return bracket_hi - bracket_lo; }
};

nlohmann::json eigenpair_to_json(const EigenPair& pair);
EigenPair eigenpair_from_json(const nlohmann::json& doc);

struct EigenOptions {
  double tol = 1e-8;         // bracket width
  long max_iterations = 100000;
  long damping_after = 200;  // undamped steps before half-step blending
  bool parallel = true;
  std::vector<double> warm_start;  // log psi over the window; empty means psi = 1
};

/// Nonlinear power iteration log psi <- log G psi - log G psi(i0) on the
/// domain, stopped when the Collatz-Wielandt bracket
/// [min_i (log G psi - log psi), max_i (...)] is at most tol wide.
/// Throws CollapseToZero when G psi(i0) = 0 or psi(i0) falls below e^-5000 times
/// the largest entry, and NoConvergence on budget.
EigenPair dirichlet_eigenpair(const DirichletDomain& domain, const EigenOptions& options = {});

/// Fixed point of
///   phi(i) = sup_nu inf_mu [e^{cbar(i,mu,nu)} sum_j phi(j) P(j|i,mu,nu)] + g(i)
/// on the domain, phi = 0 outside. cbar is laid out like the model's cost
/// tensor (GameModel::pair_index) and g has one entry per window state.
/// Requires g >= 0 on the domain; throws NotStrictlyNegative when
/// max cbar >= 0 on the domain.
std::vector<double> solve_source_problem(const DirichletDomain& domain, std::span<const double> cbar,
                                         std::span<const double> g, double tol = 1e-10,
                                         long max_iterations = 1000000);

}  // namespace rsgame
