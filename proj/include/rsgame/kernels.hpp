#pragma once

#include <span>
#include <vector>

#include "rsgame/model.hpp"

namespace rsgame {

// Each kernel has a serial reference version and an OpenMP version. States
// are independent, so both write identical bits; tests compare them.

/// log G psi(i) for every i in `domain`, with log_psi = -inf off the domain.
void apply_shapley_serial(const GameModel& model, std::span<const int> domain,
                          std::span<const double> log_psi, std::span<double> log_g);
void apply_shapley(const GameModel& model, std::span<const int> domain,
                   std::span<const double> log_psi, std::span<double> log_g);

/// max over the domain of |log G psi(i) - rho - log psi(i)|.
double shapley_residual_serial(const GameModel& model, std::span<const int> domain, double rho,
                               std::span<const double> log_psi);
double shapley_residual(const GameModel& model, std::span<const int> domain, double rho,
                        std::span<const double> log_psi);

/// Caps the OpenMP worker count; n <= 0 restores the default.
void set_thread_count(int n);
int thread_count();

}  // namespace rsgame
