#pragma once

#include <stdexcept>
#include <string>

namespace bsqz {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input violates a parameter invariant (non-finite, negative rate, ...).
class InvalidParameter : public Error {
 public:
  using Error::Error;
};

/// A nonzero effective coupling was requested with a zero single-photon coupling.
class InconsistentCoupling : public InvalidParameter {
 public:
  using InvalidParameter::InvalidParameter;
};

/// Argument outside the mathematical domain of a function (e.g. log of a
/// non-positive variance).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Malformed sweep configuration, unknown preset, unknown key.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Eigenvalue non-convergence, singular solve, violated residual bound.
class NumericalFailure : public Error {
 public:
  using Error::Error;
};

/// The drift matrix has a non-negative spectral abscissa; no steady state.
class StabilityError : public NumericalFailure {
 public:
  StabilityError(const std::string& what, double spectral_abscissa)
      : NumericalFailure(what), spectral_abscissa_(spectral_abscissa) {}
  double spectral_abscissa() const noexcept { return spectral_abscissa_; }

 private:
  double spectral_abscissa_;
};

/// Adaptive integrator step size underflowed.
class StiffnessError : public NumericalFailure {
 public:
  StiffnessError(const std::string& what, double time)
      : NumericalFailure(what), time_(time) {}
  /// Simulation time at which the step size collapsed.
  double time() const noexcept { return time_; }

 private:
  double time_;
};

/// Weak-coupling rate model evaluated where the anti-Stokes side does not
/// dominate, so the cooling rate would be non-positive.
class HeatingRegimeError : public Error {
 public:
  using Error::Error;
};

/// Optimizer found no stable grid point inside the bounds.
class InfeasibleError : public NumericalFailure {
 public:
  using NumericalFailure::NumericalFailure;
};

}  // namespace bsqz
