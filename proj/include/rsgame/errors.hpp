#pragma once

#include <stdexcept>
#include <string>

namespace rsgame {

// Base for every error raised by the library. Diagnostic operations
// (validators, checkers) never throw; solvers and ingestion do.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input document or out-of-range index during construction.
class IngestError : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class MissingLyapunovData : public Error {
 public:
  MissingLyapunovData() : Error("MissingLyapunovData: model has no lyapunov block") {}
};

class NoConvergence : public Error {
 public:
  NoConvergence(const std::string& where, long iterations, double gap)
      : Error("NoConvergence in " + where + " after " + std::to_string(iterations) +
              " iterations (gap " + std::to_string(gap) + ")"),
        iterations_(iterations),
        gap_(gap) {}
  long iterations() const { return iterations_; }
  double gap() const { return gap_; }

 private:
  long iterations_;
  double gap_;
};

class NotStrictlyNegative : public Error {
 public:
  explicit NotStrictlyNegative(double max_cost)
      : Error("NotStrictlyNegative: max cbar on domain is " + std::to_string(max_cost)),
        max_cost_(max_cost) {}
  double max_cost() const { return max_cost_; }

 private:
  double max_cost_;
};

class CollapseToZero : public Error {
 public:
  explicit CollapseToZero(long iteration)
      : Error("CollapseToZero: log G psi(i0) diverged to -inf at iteration " +
              std::to_string(iteration)) {}
};

class NotUncontrolled : public Error {
 public:
  NotUncontrolled() : Error("NotUncontrolled: some action set has more than one element") {}
};

class OpenModel : public Error {
 public:
  OpenModel(int state, double exit_mass)
      : Error("OpenModel: state " + std::to_string(state) + " leaks mass " +
              std::to_string(exit_mass) + " out of the window") {}
};

class WindowTooSmall : public Error {
 public:
  explicit WindowTooSmall(int window)
      : Error("WindowTooSmall: birth-death window " + std::to_string(window) + " < 4") {}
};

}  // namespace rsgame
