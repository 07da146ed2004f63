#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "weakarrival/arrival_operator.hpp"
#include "weakarrival/detector.hpp"
#include "weakarrival/propagator.hpp"

namespace weakarrival {

/// Impulsive coupling H_I = lambda q P1 acting for a time tau.
struct CouplingConfig {
  double lambda = 0.01;
  double tau = 1.0;

  void validate() const;
  double strength() const noexcept { return lambda * tau; }
  /// lambda tau sigma_q / hbar
  double weakness_ratio(double sigma_q, const SimulationUnits& units) const noexcept {
    return strength() * sigma_q / units.hbar;
  }
};

/// Particle (x) times detector (q) wavefunction, stored x-major:
/// amplitude(j, i) = Psi(x_j, q_i).
class JointState {
 public:
  JointState(PositionGrid x_grid, PositionGrid q_grid, SimulationUnits units,
             std::vector<Complex> amplitudes, double initial_mean_pq);

  const PositionGrid& x_grid() const noexcept { return x_grid_; }
  const PositionGrid& q_grid() const noexcept { return q_grid_; }
  const SimulationUnits& units() const noexcept { return units_; }
  std::span<const Complex> amplitudes() const noexcept { return amp_; }
  std::span<Complex> amplitudes() noexcept { return amp_; }
  Complex amplitude(std::size_t j, std::size_t i) const { return amp_[j * q_grid_.size() + i]; }

  /// <p_q> of the detector before any interaction.
  double initial_mean_pq() const noexcept { return initial_mean_pq_; }
  /// Accumulated lambda*tau of the interactions applied so far.
  double applied_coupling() const noexcept { return applied_coupling_; }
  void add_coupling(double g) noexcept { applied_coupling_ += g; }

  double norm() const;
  /// int |Psi|^2 dq on each x node.
  std::vector<double> particle_marginal() const;
  /// int |Psi|^2 dx on each q node.
  std::vector<double> detector_marginal() const;
  /// Unconditional <p_q> of the current state.
  double mean_detector_momentum() const;

 private:
  PositionGrid x_grid_;
  PositionGrid q_grid_;
  SimulationUnits units_;
  std::vector<Complex> amp_;
  double initial_mean_pq_;
  double applied_coupling_ = 0.0;
};

/// psi(x) phi(q). Both factors must be normalized to 1e-6.
JointState prepare_joint(const GridWavefunction& psi, const DetectorState& det);

/// exp(-i lambda tau q P1 / hbar) with the grid projector weights of region_weights.
JointState apply_interaction(const JointState& js, const ArrivalConfig& cfg, const CouplingConfig& cc);

struct WeakMeasurementOutcome {
  double w2 = 0.0;                     ///< W(2)
  double mean_pq_conditional = 0.0;    ///< <p_q>_2
  double mean_pq_unconditional = 0.0;  ///< <p_q> after the interaction
  double w1 = 0.0;                     ///< W(1) = (<p_q>_0 - <p_q>) / lambda tau
  double w1_given_2 = 0.0;             ///< W(1|2) = (<p_q>_0 - <p_q>_2) / lambda tau
  double w12 = 0.0;                    ///< W(1,2) = W(2) W(1|2)
};

inline constexpr double kPostselectionThreshold = 1e-10;

/// Evolves the particle factor by cfg.dt, keeps the part found in Gamma2 and
/// reads the detector momentum statistics.
///
/// Throws DegenerateCouplingError when no coupling was applied and
/// PostselectionError when W(2) < kPostselectionThreshold.
WeakMeasurementOutcome postselect(const JointState& js, const ArrivalConfig& cfg,
                                  const Dynamics& dynamics = {});

/// Conditional detector momentum distribution W(p_q|2) on the dual of the q grid.
struct ConditionalDistribution {
  std::vector<double> momentum;
  std::vector<double> density;  ///< integrates to 1 with weight dp_q / (2 pi hbar)
  double measure = 0.0;
};

ConditionalDistribution conditional_momentum_distribution(const JointState& js, const ArrivalConfig& cfg,
                                                          const Dynamics& dynamics = {});

/// n simulated pointer readouts drawn from W(p_q|2).
std::vector<double> sample_readouts(const ConditionalDistribution& dist, std::size_t n, std::uint64_t seed);

enum class SweepStatus {
  ok,
  postselection_failed,  ///< W(2) below kPostselectionThreshold
  degenerate_coupling,   ///< lambda*tau = 0
};

struct SweepPoint {
  double t = 0.0;
  SweepStatus status = SweepStatus::ok;
  std::optional<WeakMeasurementOutcome> outcome;  ///< set when status is ok
  std::string message;
};

/// For each t the particle is evolved from t = 0 and the full protocol is run.
/// Points are independent and are distributed over `jobs` threads; the
/// result keeps the order of `times`. Postselection and coupling failures are
/// recorded per point; any other error propagates.
std::vector<SweepPoint> run_protocol_sweep(const GridWavefunction& psi, const DetectorState& det,
                                           const ArrivalConfig& cfg, const CouplingConfig& cc,
                                           const std::vector<double>& times, const Dynamics& dynamics = {},
                                           unsigned jobs = 1);

}  // namespace weakarrival
