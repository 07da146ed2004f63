#pragma once

#include <vector>

#include "weakarrival/arrival_operator.hpp"

namespace weakarrival {

/// psi = N [G(pa) + ratio e^{i phase} G(pb)], two Gaussians of equal width
/// centered at x0 with mean momenta pa and pb.
struct TwoGaussianState {
  double x0 = 0.0;
  double sigma_x = 10.0;
  double pa = 0.5;
  double pb = 6.0;
  double ratio = 0.5;
  double phase = 0.0;

  GridWavefunction sample(const PositionGrid& grid, const SimulationUnits& units) const;
};

struct BackflowScanConfig {
  TwoGaussianState state;  ///< phase is overwritten by the scan
  double X = 0.0;
  double dt = 0.05;
  std::size_t phases = 48;          ///< phase grid 2 pi k / phases
  std::vector<double> times{0.0};   ///< free-evolution times tried per phase
  double half_width = 200.0;        ///< grid covers x0 +- half_width
  std::size_t n = 8192;
};

struct BackflowCandidate {
  double phase = 0.0;
  double t = 0.0;
  double pi1 = 0.0;
  /// |closed form at n - closed form at 2n| + |closed form - grid route| at n.
  double error = 0.0;
  /// int_{p<0} |phi(p)|^2 dp / 2 pi hbar of the scanned state.
  double negative_momentum_weight = 0.0;
};

/// Scans the relative phase and time and returns the most negative Pi1 found.
BackflowCandidate scan_backflow(const BackflowScanConfig& cfg, const SimulationUnits& units = {},
                                unsigned jobs = 1);

}  // namespace weakarrival
