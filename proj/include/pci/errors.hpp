#pragma once

#include <stdexcept>
#include <string>

namespace pci {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Structural problems and violated type invariants (bad sizes, mismatched
/// grids, out-of-range parameters).
class ValidationError : public Error {
public:
  using Error::Error;
};

/// A chirp or propagation multiplier would be undersampled on the grid.
class AliasingError : public Error {
public:
  AliasingError(const std::string& what, int axis) : Error(what), axis_(axis) {}
  int axis() const noexcept { return axis_; }

private:
  int axis_;
};

class DivisionByNearZero : public Error {
public:
  using Error::Error;
};

class ProbeZero : public Error {
public:
  using Error::Error;
};

class ZeroTransmission : public Error {
public:
  using Error::Error;
};

/// Nonzero samples outside the reconstruction disc.
class SupportError : public Error {
public:
  using Error::Error;
};

/// k R(delta) leaves [0, 2pi); carries the offending angle and detector offset.
class PhaseWrapError : public Error {
public:
  PhaseWrapError(const std::string& what, double theta, double x, double value)
      : Error(what), theta_(theta), x_(x), value_(value) {}
  double theta() const noexcept { return theta_; }
  double x() const noexcept { return x_; }
  double value() const noexcept { return value_; }

private:
  double theta_;
  double x_;
  double value_;
};

class SolverError : public Error {
public:
  using Error::Error;
};

/// Dense analysis requested beyond the fixed size budget.
class BudgetError : public Error {
public:
  using Error::Error;
};

}  // namespace pci
