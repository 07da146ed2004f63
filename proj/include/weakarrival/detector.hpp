#pragma once

#include <vector>

#include "weakarrival/arrival_operator.hpp"
#include "weakarrival/grid.hpp"

namespace weakarrival {

/// Pointer state phi(q) of the detector on its own coordinate grid.
///
/// Moments are recomputed from the amplitudes on every call; derivatives in
/// q are spectral.
class DetectorState {
 public:
  /// Takes position amplitudes phi(q_i). Throws NormalizationError unless the
  /// discrete norm is 1 within 1e-9.
  DetectorState(PositionGrid q_grid, SimulationUnits units, std::vector<Complex> amplitudes);

  /// phi(q) = (2 pi s^2)^(-1/4) exp(-(q-q0)^2 / 4s^2) exp(i p0 q / hbar) exp(i chirp q^2 / 2),
  /// sampled and renormalized.
  static DetectorState gaussian(const PositionGrid& q_grid, const SimulationUnits& units,
                                double sigma_q, double mean_q = 0.0, double mean_p = 0.0,
                                double chirp = 0.0);

  const GridWavefunction& wavefunction() const noexcept { return phi_; }
  const PositionGrid& grid() const noexcept { return phi_.grid(); }
  const SimulationUnits& units() const noexcept { return phi_.units(); }

  double mean_q() const;
  double mean_pq() const;
  /// Re<q p_q>
  double re_qpq() const;

 private:
  GridWavefunction phi_;
};

/// <p_q><q> - Re<q p_q>
double detector_coefficient(const DetectorState& det);

/// W(1,2) = Pi1 dt - (2 dt / hbar) c Pi2 for the given detector.
double w12_predicted(const GridWavefunction& psi, const DetectorState& det, const ArrivalConfig& cfg);

}  // namespace weakarrival
