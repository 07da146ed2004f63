#include "weakarrival/detector.hpp"

#include <cmath>
#include <numbers>

#include "weakarrival/errors.hpp"

namespace weakarrival {

namespace {

constexpr double kDetectorNormTolerance = 1e-9;

// -i hbar d/dq phi, evaluated spectrally.
GridWavefunction apply_momentum(const GridWavefunction& phi) {
  GridWavefunction out = phi.to_momentum();
  auto a = out.amplitudes();
  for (std::size_t k = 0; k < a.size(); ++k) a[k] *= out.coordinate(k);
  return out.to_position();
}

}  // namespace

DetectorState::DetectorState(PositionGrid q_grid, SimulationUnits units, std::vector<Complex> amplitudes)
    : phi_(q_grid, units, Representation::position, std::move(amplitudes)) {
  const double n = phi_.norm();
  if (!(std::abs(n - 1.0) <= kDetectorNormTolerance))
    throw NormalizationError("detector: norm " + std::to_string(n) + " differs from 1 by more than 1e-9");
}

DetectorState DetectorState::gaussian(const PositionGrid& q_grid, const SimulationUnits& units,
                                      double sigma_q, double mean_q, double mean_p, double chirp) {
  if (!(std::isfinite(sigma_q) && sigma_q > 0.0)) throw DomainError("detector: sigma_q must be positive");
  if (!std::isfinite(mean_q) || !std::isfinite(mean_p) || !std::isfinite(chirp))
    throw DomainError("detector: non-finite parameter");
  units.validate();
  std::vector<Complex> amp(q_grid.size());
  for (std::size_t i = 0; i < amp.size(); ++i) {
    const double q = q_grid.node(i);
    const double d = q - mean_q;
    amp[i] = std::exp(-d * d / (4.0 * sigma_q * sigma_q)) *
             std::polar(1.0, mean_p * q / units.hbar + 0.5 * chirp * q * q);
  }
  GridWavefunction phi(q_grid, units, Representation::position, std::move(amp));
  phi = phi.normalized();
  return DetectorState(q_grid, units, {phi.amplitudes().begin(), phi.amplitudes().end()});
}

double DetectorState::mean_q() const {
  const auto a = phi_.amplitudes();
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += phi_.coordinate(i) * std::norm(a[i]);
  return s * phi_.measure();
}

double DetectorState::mean_pq() const {
  const GridWavefunction p = phi_.to_momentum();
  const auto a = p.amplitudes();
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += p.coordinate(k) * std::norm(a[k]);
  return s * p.measure();
}

double DetectorState::re_qpq() const {
  const GridWavefunction p_phi = apply_momentum(phi_);
  const auto a = phi_.amplitudes();
  const auto b = p_phi.amplitudes();
  Complex s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * phi_.coordinate(i) * b[i];
  return (s * phi_.measure()).real();
}

double detector_coefficient(const DetectorState& det) {
  return det.mean_pq() * det.mean_q() - det.re_qpq();
}

double w12_predicted(const GridWavefunction& psi, const DetectorState& det, const ArrivalConfig& cfg) {
  return w12_predicted(expectation_pi(psi, cfg), detector_coefficient(det), cfg);
}

}  // namespace weakarrival
