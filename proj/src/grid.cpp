#include "weakarrival/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fft.hpp"
#include "weakarrival/errors.hpp"

namespace weakarrival {

void SimulationUnits::validate() const {
  if (!(std::isfinite(hbar) && hbar > 0.0)) throw DomainError("units: hbar must be positive");
  if (!(std::isfinite(mass) && mass > 0.0)) throw DomainError("units: mass must be positive");
}

bool is_power_of_two(std::size_t n) noexcept { return n != 0 && (n & (n - 1)) == 0; }

PositionGrid::PositionGrid(double min, double max, std::size_t n) : min_(min), max_(max), n_(n) {
  if (n < 2 || !is_power_of_two(n)) throw DomainError("grid: n must be a power of two >= 2");
  if (!(std::isfinite(min) && std::isfinite(max) && max > min))
    throw DomainError("grid: require finite min < max");
  dx_ = (max - min) / static_cast<double>(n);
}

std::size_t PositionGrid::nearest_node(double x) const {
  const double j = std::round((x - min_) / dx_);
  return static_cast<std::size_t>(std::clamp(j, 0.0, static_cast<double>(n_ - 1)));
}

bool PositionGrid::interior(double x) const noexcept { return x > node(0) && x < node(n_ - 1); }

MomentumGrid::MomentumGrid(const PositionGrid& x, const SimulationUnits& units)
    : n_(x.size()),
      dp_(2.0 * std::numbers::pi * units.hbar / (static_cast<double>(x.size()) * x.spacing())) {}

GridWavefunction::GridWavefunction(PositionGrid grid, SimulationUnits units, Representation rep,
                                   std::vector<Complex> amplitudes)
    : grid_(grid), units_(units), rep_(rep), amplitudes_(std::move(amplitudes)) {
  units_.validate();
  if (amplitudes_.size() != grid_.size())
    throw DomainError("wavefunction: amplitude count does not match grid");
}

double GridWavefunction::measure() const noexcept {
  if (rep_ == Representation::position) return grid_.spacing();
  return momentum_grid().spacing() / (2.0 * std::numbers::pi * units_.hbar);
}

double GridWavefunction::coordinate(std::size_t i) const noexcept {
  return rep_ == Representation::position ? grid_.node(i) : momentum_grid().node(i);
}

double GridWavefunction::norm() const {
  double s = 0.0;
  for (const auto& a : amplitudes_) s += std::norm(a);
  return std::sqrt(s * measure());
}

GridWavefunction GridWavefunction::normalized() const {
  const double n = norm();
  if (!(n > 0.0)) throw NormalizationError("wavefunction: cannot normalize a zero state");
  GridWavefunction out = *this;
  for (auto& a : out.amplitudes_) a /= n;
  return out;
}

// phi_k = dx * exp(-i p_k x_min / hbar) * sum_j psi_j (-1)^j exp(-2 pi i j k / n),
// which is the Riemann sum of int dx exp(-i p x / hbar) psi(x) on the centered p grid.
GridWavefunction GridWavefunction::to_momentum() const {
  if (rep_ == Representation::momentum) return *this;
  const std::size_t n = grid_.size();
  const MomentumGrid pg = momentum_grid();
  std::vector<Complex> buf(amplitudes_);
  for (std::size_t j = 1; j < n; j += 2) buf[j] = -buf[j];
  detail::fft_forward(buf);
  const double dx = grid_.spacing();
  for (std::size_t k = 0; k < n; ++k)
    buf[k] *= dx * std::polar(1.0, -pg.node(k) * grid_.min() / units_.hbar);
  return GridWavefunction(grid_, units_, Representation::momentum, std::move(buf));
}

GridWavefunction GridWavefunction::to_position() const {
  if (rep_ == Representation::position) return *this;
  const std::size_t n = grid_.size();
  const MomentumGrid pg = momentum_grid();
  std::vector<Complex> buf(amplitudes_);
  for (std::size_t k = 0; k < n; ++k)
    buf[k] *= std::polar(1.0, pg.node(k) * grid_.min() / units_.hbar);
  detail::fft_backward(buf);
  const double scale = 1.0 / (static_cast<double>(n) * grid_.spacing());
  for (std::size_t j = 0; j < n; ++j) buf[j] *= (j % 2 == 0 ? scale : -scale);
  return GridWavefunction(grid_, units_, Representation::position, std::move(buf));
}

GridWavefunction GridWavefunction::in(Representation rep) const {
  return rep == Representation::position ? to_position() : to_momentum();
}

Complex GridWavefunction::inner_product(const GridWavefunction& other) const {
  if (!(grid_ == other.grid_)) throw DomainError("inner product: grids differ");
  const GridWavefunction rhs = other.in(rep_);
  Complex s = 0.0;
  for (std::size_t i = 0; i < amplitudes_.size(); ++i)
    s += std::conj(amplitudes_[i]) * rhs.amplitudes_[i];
  return s * measure();
}

void GaussianPacket::validate() const {
  if (!(std::isfinite(sigma_x) && sigma_x > 0.0)) throw DomainError("packet: sigma_x must be positive");
  if (!std::isfinite(x0) || !std::isfinite(p0)) throw DomainError("packet: non-finite center");
}

Complex GaussianPacket::position_amplitude(double x, const SimulationUnits& units) const {
  const double d = x - x0;
  const double norm = std::pow(2.0 * std::numbers::pi * sigma_x * sigma_x, -0.25);
  return norm * std::exp(-d * d / (4.0 * sigma_x * sigma_x)) *
         std::polar(1.0, p0 * x / units.hbar);
}

Complex GaussianPacket::momentum_amplitude(double p, const SimulationUnits& units) const {
  // Fourier transform of position_amplitude with the exp(i p0 x) phase referenced to x = 0.
  const double d = p - p0;
  const double norm = std::pow(8.0 * std::numbers::pi * sigma_x * sigma_x, 0.25);
  return norm * std::exp(-d * d * sigma_x * sigma_x / (units.hbar * units.hbar)) *
         std::polar(1.0, -d * x0 / units.hbar);
}

GridWavefunction GaussianPacket::sample(const PositionGrid& grid, const SimulationUnits& units) const {
  validate();
  std::vector<Complex> amp(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) amp[j] = position_amplitude(grid.node(j), units);
  return GridWavefunction(grid, units, Representation::position, std::move(amp)).normalized();
}

double GaussianPacket::sigma_x_at(double t, const SimulationUnits& units) const {
  const double spread = units.hbar * t / (2.0 * units.mass * sigma_x);
  return std::sqrt(sigma_x * sigma_x + spread * spread);
}

PositionGrid auto_grid(const GaussianPacket& packet, double X, double t_max,
                       const SimulationUnits& units, std::size_t n) {
  packet.validate();
  units.validate();
  const double width = packet.sigma_x_at(std::abs(t_max), units);
  const double half = std::max(8.0 * width,
                               4.0 * std::abs(packet.p0) * std::abs(t_max) / units.mass +
                                   8.0 * packet.sigma_x);
  const double lo = std::min(packet.x0 - half, X - 8.0 * width);
  const double hi = std::max(packet.x0 + half, X + 8.0 * width);
  // Grow n until the Nyquist momentum clears the packet's momentum support.
  const double p_needed = std::abs(packet.p0) + 12.0 * packet.sigma_p(units);
  while (std::numbers::pi * units.hbar * static_cast<double>(n) / (hi - lo) < p_needed) n *= 2;
  return PositionGrid(lo, hi, n);
}

}  // namespace weakarrival
