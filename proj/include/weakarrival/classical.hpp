#pragma once

#include <cstdint>
#include <vector>

#include "weakarrival/potential.hpp"
#include "weakarrival/units.hpp"

namespace weakarrival {

struct PhaseSpacePoint {
  double x = 0.0;
  double p = 0.0;
};

/// Equally weighted samples of a phase-space density rho(x, p).
struct PhaseSpaceEnsemble {
  std::vector<PhaseSpacePoint> samples;
  std::uint64_t seed = 0;

  double weight() const noexcept { return samples.empty() ? 0.0 : 1.0 / static_cast<double>(samples.size()); }
};

/// Independent normal draws in x and p (Box-Muller on mt19937_64, so the
/// stream is identical on every platform).
PhaseSpaceEnsemble sample_gaussian_ensemble(double x0, double p0, double sigma_x, double sigma_p,
                                            std::size_t n, std::uint64_t seed);

/// Moves every sample along its trajectory for a time t >= 0.
///
/// Free motion is exact. Under a potential each trajectory is integrated with
/// velocity Verlet; the step count doubles until the largest relative energy
/// drift along the trajectory is below 1e-6, and NumericalError is thrown past
/// 1e6 steps.
PhaseSpaceEnsemble evolve_ensemble(const PhaseSpaceEnsemble& ens, double t, const SimulationUnits& units,
                                   const PotentialSpec* potential = nullptr, unsigned jobs = 1);

/// Instantaneous one-sided fluxes through X from a Gaussian kernel density
/// estimate of rho(X, p; t), unnormalized.
struct ArrivalDensity {
  double pi_plus = 0.0;   ///< int_{p>0} (p/m) rho(X, p) dp
  double pi_minus = 0.0;  ///< int_{p<0} (|p|/m) rho(X, p) dp
  double j = 0.0;         ///< pi_plus - pi_minus
  double mc_error = 0.0;  ///< standard error of pi_plus over 10 blocks
  double pi_minus_error = 0.0;
  double j_error = 0.0;
  double bandwidth = 0.0;  ///< kernel width actually used
};

/// 0.9 min(sd, IQR/1.34) n^(-1/5) of the x marginal.
double silverman_bandwidth(const PhaseSpaceEnsemble& ens);

/// Evolves `ens` to time t, then estimates the fluxes. bandwidth <= 0 selects
/// silverman_bandwidth of the evolved ensemble.
ArrivalDensity arrival_density(const PhaseSpaceEnsemble& ens, double X, double t, const SimulationUnits& units,
                               const PotentialSpec* potential = nullptr, double bandwidth = 0.0);

/// Flux estimate on an ensemble already at the time of interest.
ArrivalDensity flux_at(const PhaseSpaceEnsemble& ens_t, double X, const SimulationUnits& units,
                       double bandwidth = 0.0);

/// Finite-resolution arrival probabilities per unit time:
/// pi_plus = Pr(x(t) < X, x(t+dt) > X) / dt and pi_minus with the regions swapped.
/// This is the classical counterpart of Pi1 at the same dt.
struct WindowArrival {
  double pi_plus = 0.0;
  double pi_minus = 0.0;
  double pi_plus_error = 0.0;
  double pi_minus_error = 0.0;
};

WindowArrival arrival_probability_window(const PhaseSpaceEnsemble& ens, double X, double t, double dt,
                                         const SimulationUnits& units, const PotentialSpec* potential = nullptr,
                                         unsigned jobs = 1);

/// Fraction of samples with x > X.
double fraction_beyond(const PhaseSpaceEnsemble& ens, double X);

}  // namespace weakarrival
