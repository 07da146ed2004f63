#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "weakarrival/specfun.hpp"
#include "weakarrival/units.hpp"

namespace weakarrival {

/// Uniform periodic grid x_j = min + j*dx, j = 0..n-1, dx = (max-min)/n.
class PositionGrid {
 public:
  PositionGrid(double min, double max, std::size_t n);

  double min() const noexcept { return min_; }
  double max() const noexcept { return max_; }
  double spacing() const noexcept { return dx_; }
  double length() const noexcept { return max_ - min_; }
  std::size_t size() const noexcept { return n_; }
  double node(std::size_t j) const noexcept { return min_ + static_cast<double>(j) * dx_; }
  std::size_t nearest_node(double x) const;
  /// True when x lies strictly between the first and last node.
  bool interior(double x) const noexcept;

  friend bool operator==(const PositionGrid&, const PositionGrid&) = default;

 private:
  double min_;
  double max_;
  std::size_t n_;
  double dx_;
};

/// Fourier dual of a PositionGrid: p_k = (k - n/2)*dp with dp = 2*pi*hbar/(n*dx).
class MomentumGrid {
 public:
  MomentumGrid(const PositionGrid& x, const SimulationUnits& units);

  double spacing() const noexcept { return dp_; }
  std::size_t size() const noexcept { return n_; }
  double node(std::size_t k) const noexcept {
    return (static_cast<double>(k) - static_cast<double>(n_ / 2)) * dp_;
  }
  double min() const noexcept { return node(0); }
  double max() const noexcept { return node(n_ - 1); }

 private:
  std::size_t n_;
  double dp_;
};

enum class Representation { position, momentum };

/// Sampled wavefunction on a position grid or its dual momentum grid.
///
/// Position amplitudes are psi(x_j) with norm sum |psi|^2 dx. Momentum
/// amplitudes follow <p|p'> = 2*pi*hbar*delta(p-p'), i.e.
/// phi(p) = int dx exp(-i p x / hbar) psi(x) with norm sum |phi|^2 dp/(2*pi*hbar).
class GridWavefunction {
 public:
  GridWavefunction(PositionGrid grid, SimulationUnits units, Representation rep,
                   std::vector<Complex> amplitudes);

  const PositionGrid& grid() const noexcept { return grid_; }
  MomentumGrid momentum_grid() const { return MomentumGrid(grid_, units_); }
  const SimulationUnits& units() const noexcept { return units_; }
  Representation representation() const noexcept { return rep_; }
  std::span<const Complex> amplitudes() const noexcept { return amplitudes_; }
  std::span<Complex> amplitudes() noexcept { return amplitudes_; }

  /// Quadrature weight per node: dx, or dp/(2*pi*hbar).
  double measure() const noexcept;
  /// Coordinate of node i in the current representation.
  double coordinate(std::size_t i) const noexcept;
  double norm() const;
  GridWavefunction normalized() const;

  GridWavefunction to_momentum() const;
  GridWavefunction to_position() const;
  GridWavefunction in(Representation rep) const;

  /// <this|other> in the common representation.
  Complex inner_product(const GridWavefunction& other) const;

 private:
  PositionGrid grid_;
  SimulationUnits units_;
  Representation rep_;
  std::vector<Complex> amplitudes_;
};

/// Minimum-uncertainty Gaussian packet.
struct GaussianPacket {
  double x0 = 0.0;
  double p0 = 0.0;
  double sigma_x = 1.0;

  void validate() const;
  double sigma_p(const SimulationUnits& units) const { return units.hbar / (2.0 * sigma_x); }
  Complex position_amplitude(double x, const SimulationUnits& units) const;
  /// phi(p) in the 2*pi*hbar momentum normalization.
  Complex momentum_amplitude(double p, const SimulationUnits& units) const;
  /// Position-sampled and renormalized on the grid.
  GridWavefunction sample(const PositionGrid& grid, const SimulationUnits& units) const;
  /// Width of the freely spread packet at time t.
  double sigma_x_at(double t, const SimulationUnits& units) const;
};

/// Default grid covering the packet from t = 0 to t_max and the arrival point.
///
/// Half-width max(8 sigma_x(t_max), 4|p0| t_max/m + 8 sigma_x), widened to
/// include X with the same margin; n must be a power of two.
PositionGrid auto_grid(const GaussianPacket& packet, double X, double t_max,
                       const SimulationUnits& units, std::size_t n = 4096);

bool is_power_of_two(std::size_t n) noexcept;

}  // namespace weakarrival
