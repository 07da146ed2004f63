#pragma once

#include <span>
#include <vector>

#include "weakarrival/grid.hpp"

namespace weakarrival {

/// External potential tabulated on a position grid.
///
/// Off-node values (needed by classical trajectories) use cubic Hermite
/// interpolation with central-difference slopes, which is exact for
/// quadratic potentials.
class PotentialSpec {
 public:
  PotentialSpec(PositionGrid grid, std::vector<double> values);

  static PotentialSpec zero(const PositionGrid& grid);
  /// V(x) = k (x - center)^2 / 2
  static PotentialSpec harmonic(const PositionGrid& grid, double k, double center = 0.0);

  const PositionGrid& grid() const noexcept { return grid_; }
  std::span<const double> values() const noexcept { return values_; }
  bool is_zero() const noexcept { return is_zero_; }

  double value_at(double x) const;
  double force_at(double x) const;

 private:
  double slope(std::size_t j) const;

  PositionGrid grid_;
  std::vector<double> values_;
  bool is_zero_;
};

}  // namespace weakarrival
