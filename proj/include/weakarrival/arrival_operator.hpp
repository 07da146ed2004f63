#pragma once

#include "weakarrival/grid.hpp"
#include "weakarrival/propagator.hpp"

namespace weakarrival {

/// Arrival point X and resolution time dt. Gamma1 = {x < X}, Gamma2 = {x > X}.
struct ArrivalConfig {
  double X = 0.0;
  double dt = 1.0;
  SimulationUnits units;

  void validate() const;
};

/// Pi_C = Pi1 + i Pi2 = <P1 P2~(dt)> / dt, in units of 1/time (unnormalized).
struct ComplexArrivalResult {
  double pi1 = 0.0;
  double pi2 = 0.0;

  Complex pi_c() const noexcept { return {pi1, pi2}; }
};

/// Which of the two arrival operators to evaluate.
enum class ArrivalDirection {
  from_left,   ///< Pi+ = P1 P2~(dt) / dt
  from_right,  ///< Pi- = P2 P1~(dt) / dt
};

/// <p1|Pi+|p2> in the 2*pi*hbar momentum normalization (free particle).
///
///   i hbar / (2 dt (p2-p1)) exp(i (p2-p1) X / hbar)
///     * [exp(i dt (p1^2-p2^2) / (2 hbar m)) erfc(-p1 a) - erfc(-p2 a)],
///   a = sqrt(i dt / (2 hbar m)),  sqrt(i) = exp(i pi/4).
///
/// Close to the diagonal the removable singularity is replaced by a
/// second-order expansion about the midpoint momentum.
Complex pi_plus_matrix_element(double p1, double p2, const ArrivalConfig& cfg);

/// <p|Pi+|p> = (p/2m) erfc(-p a) + hbar / sqrt(i 2 pi hbar m dt) exp(-i p^2 dt / (2 hbar m))
Complex pi_plus_diagonal(double p, const ArrivalConfig& cfg);

/// Probability-current matrix element (p1+p2)/2m exp(i (p2-p1) X / hbar).
Complex pi_plus_semiclassical(double p1, double p2, const ArrivalConfig& cfg);

/// <p1|Pi-|p2>. Swapping the two regions in the defining double integral maps
/// it onto Pi+ with reflected momenta and arrival point:
/// <p1|Pi-|p2>(X) = <-p1|Pi+|-p2>(-X).
Complex pi_minus_matrix_element(double p1, double p2, const ArrivalConfig& cfg);

/// Double trapezoidal quadrature (1/2 pi hbar)^2 sum phi*(p1) <p1|Pi|p2> phi(p2) dp^2
/// over the momentum grid. Throws NormalizationError if | ||psi|| - 1 | > 1e-6.
ComplexArrivalResult expectation_pi(const GridWavefunction& psi, const ArrivalConfig& cfg,
                                    ArrivalDirection direction = ArrivalDirection::from_left);

/// Operator-composition route on the position grid:
/// <P1 P2~(dt)> = < U(dt) P1 psi | P2 U(dt) psi >, with U from `dynamics`.
/// This is the route used when the particle moves in an external potential.
ComplexArrivalResult expectation_pi_grid(const GridWavefunction& psi, const ArrivalConfig& cfg,
                                         const Dynamics& dynamics = {},
                                         ArrivalDirection direction = ArrivalDirection::from_left);

/// First-order weak-measurement prediction
/// W(1,2) = Pi1 dt - (2 dt / hbar) c Pi2, with c = <p_q><q> - Re<q p_q>.
double w12_predicted(const ComplexArrivalResult& pi, double detector_coefficient,
                     const ArrivalConfig& cfg);

}  // namespace weakarrival
