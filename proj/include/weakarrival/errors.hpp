#pragma once

#include <stdexcept>
#include <string>

namespace weakarrival {

/// Invalid argument to a numerical routine (non-finite input, empty grid, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A computation could not meet its accuracy or stability contract.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Wavefunction norm is too far from one for the requested operation.
class NormalizationError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Free propagator requested at t = 0.
class SingularTimeError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Postselection probability W(2) is too small for conditional statistics.
class PostselectionError : public NumericalError {
 public:
  explicit PostselectionError(double w2)
      : NumericalError("postselection probability W(2) = " + std::to_string(w2) +
                       " is below threshold; conditional detector statistics undefined"),
        w2_(w2) {}
  double w2() const noexcept { return w2_; }

 private:
  double w2_;
};

/// Weak values are undefined when the coupling lambda*tau vanishes.
class DegenerateCouplingError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace weakarrival
