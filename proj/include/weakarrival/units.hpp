#pragma once

namespace weakarrival {

/// Reduced Planck constant and particle mass; everything else is derived.
struct SimulationUnits {
  double hbar = 1.0;
  double mass = 1.0;

  /// Throws DomainError unless both are finite and strictly positive.
  void validate() const;

  friend bool operator==(const SimulationUnits&, const SimulationUnits&) = default;
};

}  // namespace weakarrival
