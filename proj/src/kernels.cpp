#include "rsgame/kernels.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>

#include "rsgame/localgame.hpp"

namespace rsgame {
namespace {

double residual_term(double log_g, double rho, double log_psi) {
  const double r = log_g - rho - log_psi;
  return std::isnan(r) ? std::numeric_limits<double>::infinity() : std::abs(r);
}

}  // namespace

void apply_shapley_serial(const GameModel& model, std::span<const int> domain,
                          std::span<const double> log_psi, std::span<double> log_g) {
  for (std::size_t k = 0; k < domain.size(); ++k)
    log_g[k] = shapley_value(model, domain[k], log_psi);
}

void apply_shapley(const GameModel& model, std::span<const int> domain,
                   std::span<const double> log_psi, std::span<double> log_g) {
  const long n = static_cast<long>(domain.size());
#pragma omp parallel for schedule(dynamic, 4)
  for (long k = 0; k < n; ++k) log_g[k] = shapley_value(model, domain[k], log_psi);
}

double shapley_residual_serial(const GameModel& model, std::span<const int> domain, double rho,
                               std::span<const double> log_psi) {
  std::vector<double> log_g(domain.size());
  apply_shapley_serial(model, domain, log_psi, log_g);
  double worst = 0.0;
  for (std::size_t k = 0; k < domain.size(); ++k)
    worst = std::max(worst, residual_term(log_g[k], rho, log_psi[domain[k]]));
  return worst;
}

double shapley_residual(const GameModel& model, std::span<const int> domain, double rho,
                        std::span<const double> log_psi) {
  std::vector<double> log_g(domain.size());
  apply_shapley(model, domain, log_psi, log_g);
  // max is order independent, so a serial pass keeps the result bit-stable.
  double worst = 0.0;
  for (std::size_t k = 0; k < domain.size(); ++k)
    worst = std::max(worst, residual_term(log_g[k], rho, log_psi[domain[k]]));
  return worst;
}

void set_thread_count(int n) { omp_set_num_threads(n > 0 ? n : omp_get_num_procs()); }

int thread_count() { return omp_get_max_threads(); }

}  // namespace rsgame
