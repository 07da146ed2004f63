#pragma once

#include <cstddef>
#include <vector>

#include "weakarrival/grid.hpp"
#include "weakarrival/potential.hpp"

namespace weakarrival {

/// <x1|U(t)|x2> = sqrt(m / (2 pi i hbar t)) exp(i m (x1-x2)^2 / (2 hbar t)), sqrt(i) = exp(i pi/4).
/// Throws SingularTimeError at t = 0.
Complex free_propagator_kernel(double x1, double x2, double t, const SimulationUnits& units);
/// <x1|U(t)^dagger|x2>
Complex free_propagator_kernel_adjoint(double x1, double x2, double t, const SimulationUnits& units);

/// Multiplies momentum amplitudes by exp(-i p^2 t / (2 m hbar)).
GridWavefunction evolve_free(const GridWavefunction& psi, double t);

struct EvolutionDiagnostics {
  /// Largest |psi| seen on the edge nodes during the evolution.
  double max_edge_amplitude = 0.0;
  /// Set when max_edge_amplitude exceeds kBoundaryLeakWarning.
  bool boundary_leak = false;
};

inline constexpr double kBoundaryLeakWarning = 1e-4;

/// Strang split-operator evolution exp(-iV dt/2) exp(-iT dt) exp(-iV dt/2) per step.
GridWavefunction evolve_potential(const GridWavefunction& psi, const PotentialSpec& potential,
                                  double t, std::size_t steps,
                                  EvolutionDiagnostics* diagnostics = nullptr);

enum class Side { left, right };

/// Diagonal weights of the region projector on the grid.
///
/// Each node owns the cell [x_j - dx/2, x_j + dx/2); its left weight is the
/// fraction of that cell below X. A node sitting exactly on X therefore gets
/// weight 1/2, and left + right = 1 on every node.
std::vector<double> region_weights(const PositionGrid& grid, double X, Side side);

/// Applies region_weights to a position-space wavefunction. Throws DomainError
/// when X is not inside the grid interior.
GridWavefunction project_region(const GridWavefunction& psi, double X, Side side);

/// Time evolution of a particle, free or under a tabulated potential.
struct Dynamics {
  const PotentialSpec* potential = nullptr;  ///< nullptr or a zero table means free
  double max_time_step = 1e-2;               ///< split-operator step bound

  bool is_free() const noexcept { return potential == nullptr || potential->is_zero(); }
  /// Returns psi(t) in the representation of the input.
  GridWavefunction evolve(const GridWavefunction& psi, double t,
                          EvolutionDiagnostics* diagnostics = nullptr) const;
  std::size_t steps_for(double t) const;
};

}  // namespace weakarrival
