#include "weakarrival/potential.hpp"

#include <algorithm>
#include <cmath>

#include "weakarrival/errors.hpp"

namespace weakarrival {

PotentialSpec::PotentialSpec(PositionGrid grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size()) throw DomainError("potential: table size does not match grid");
  for (double v : values_)
    if (!std::isfinite(v)) throw DomainError("potential: non-finite table entry");
  is_zero_ = std::all_of(values_.begin(), values_.end(), [](double v) { return v == 0.0; });
}

PotentialSpec PotentialSpec::zero(const PositionGrid& grid) {
  return PotentialSpec(grid, std::vector<double>(grid.size(), 0.0));
}

PotentialSpec PotentialSpec::harmonic(const PositionGrid& grid, double k, double center) {
  std::vector<double> v(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double d = grid.node(j) - center;
    v[j] = 0.5 * k * d * d;
  }
  return PotentialSpec(grid, std::move(v));
}

double PotentialSpec::slope(std::size_t j) const {
  const double dx = grid_.spacing();
  const std::size_t n = values_.size();
  if (j == 0) return (-3.0 * values_[0] + 4.0 * values_[1] - values_[2]) / (2.0 * dx);
  if (j == n - 1) return (3.0 * values_[n - 1] - 4.0 * values_[n - 2] + values_[n - 3]) / (2.0 * dx);
  return (values_[j + 1] - values_[j - 1]) / (2.0 * dx);
}

namespace {

struct Cell {
  std::size_t j;
  double s;  // position within [x_j, x_{j+1}] scaled to [0, 1]
};

Cell locate(const PositionGrid& grid, double x) {
  const double last = grid.node(grid.size() - 1);
  if (!(x >= grid.min() && x <= last))
    throw DomainError("potential: position outside the tabulated range");
  const double u = (x - grid.min()) / grid.spacing();
  auto j = static_cast<std::size_t>(std::floor(u));
  if (j >= grid.size() - 1) j = grid.size() - 2;
  return {j, u - static_cast<double>(j)};
}

}  // namespace

double PotentialSpec::value_at(double x) const {
  if (is_zero_) return 0.0;
  const auto [j, s] = locate(grid_, x);
  const double dx = grid_.spacing();
  const double s2 = s * s, s3 = s2 * s;
  const double h00 = 2 * s3 - 3 * s2 + 1, h10 = s3 - 2 * s2 + s;
  const double h01 = -2 * s3 + 3 * s2, h11 = s3 - s2;
  return h00 * values_[j] + h10 * dx * slope(j) + h01 * values_[j + 1] + h11 * dx * slope(j + 1);
}

double PotentialSpec::force_at(double x) const {
  if (is_zero_) return 0.0;
  const auto [j, s] = locate(grid_, x);
  const double dx = grid_.spacing();
  const double s2 = s * s;
  const double d00 = 6 * s2 - 6 * s, d10 = 3 * s2 - 4 * s + 1;
  const double d01 = -6 * s2 + 6 * s, d11 = 3 * s2 - 2 * s;
  const double dvds = d00 * values_[j] + d10 * dx * slope(j) + d01 * values_[j + 1] +
                      d11 * dx * slope(j + 1);
  return -dvds / dx;
}

}  // namespace weakarrival
