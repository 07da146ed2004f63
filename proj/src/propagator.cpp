#include "weakarrival/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fft.hpp"
#include "weakarrival/errors.hpp"

namespace weakarrival {

Complex free_propagator_kernel(double x1, double x2, double t, const SimulationUnits& units) {
  if (t == 0.0) throw SingularTimeError("free propagator kernel is singular at t = 0");
  const double m = units.mass, hbar = units.hbar;
  const double modulus = std::sqrt(m / (2.0 * std::numbers::pi * hbar * std::abs(t)));
  // 1/sqrt(i) = exp(-i pi/4) for t > 0; the branch flips with the sign of t.
  const double branch = t > 0.0 ? -std::numbers::pi / 4.0 : std::numbers::pi / 4.0;
  const double d = x1 - x2;
  return std::polar(modulus, branch + m * d * d / (2.0 * hbar * t));
}

Complex free_propagator_kernel_adjoint(double x1, double x2, double t, const SimulationUnits& units) {
  return std::conj(free_propagator_kernel(x2, x1, t, units));
}

GridWavefunction evolve_free(const GridWavefunction& psi, double t) {
  if (psi.representation() != Representation::momentum)
    throw DomainError("evolve_free expects a momentum-space wavefunction");
  GridWavefunction out = psi;
  if (t == 0.0) return out;
  const MomentumGrid pg = psi.momentum_grid();
  const double scale = t / (2.0 * psi.units().mass * psi.units().hbar);
  auto amp = out.amplitudes();
  for (std::size_t k = 0; k < amp.size(); ++k) {
    const double p = pg.node(k);
    amp[k] *= std::polar(1.0, -p * p * scale);
  }
  return out;
}

namespace {

constexpr std::size_t kEdgeNodes = 4;

double edge_amplitude(std::span<const Complex> a) {
  double m = 0.0;
  const std::size_t n = a.size();
  for (std::size_t i = 0; i < std::min(kEdgeNodes, n); ++i)
    m = std::max({m, std::abs(a[i]), std::abs(a[n - 1 - i])});
  return m;
}

}  // namespace

GridWavefunction evolve_potential(const GridWavefunction& psi, const PotentialSpec& potential,
                                  double t, std::size_t steps, EvolutionDiagnostics* diagnostics) {
  if (psi.representation() != Representation::position)
    throw DomainError("evolve_potential expects a position-space wavefunction");
  if (!(psi.grid() == potential.grid())) throw DomainError("evolve_potential: potential grid differs");
  if (steps < 1) throw DomainError("evolve_potential: steps must be >= 1");

  const PositionGrid& grid = psi.grid();
  const std::size_t n = grid.size();
  const double hbar = psi.units().hbar, mass = psi.units().mass;
  const double h = t / static_cast<double>(steps);

  std::vector<Complex> half_kick(n), full_kick(n), drift(n);
  const auto v = potential.values();
  for (std::size_t j = 0; j < n; ++j) {
    half_kick[j] = std::polar(1.0, -v[j] * h / (2.0 * hbar));
    full_kick[j] = half_kick[j] * half_kick[j];
  }
  // Raw FFT ordering: index k carries momentum k*dp for k < n/2 and (k-n)*dp above.
  const double dp = 2.0 * std::numbers::pi * hbar / (static_cast<double>(n) * grid.spacing());
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double idx = k < n / 2 ? static_cast<double>(k) : static_cast<double>(k) - static_cast<double>(n);
    const double p = idx * dp;
    drift[k] = std::polar(inv_n, -p * p * h / (2.0 * mass * hbar));
  }

  GridWavefunction out = psi;
  auto a = out.amplitudes();
  double edge = edge_amplitude(a);
  for (std::size_t j = 0; j < n; ++j) a[j] *= half_kick[j];
  for (std::size_t s = 0; s < steps; ++s) {
    detail::fft_forward(a);
    for (std::size_t k = 0; k < n; ++k) a[k] *= drift[k];
    detail::fft_backward(a);
    const auto& kick = (s + 1 == steps) ? half_kick : full_kick;
    for (std::size_t j = 0; j < n; ++j) a[j] *= kick[j];
    edge = std::max(edge, edge_amplitude(a));
  }
  if (diagnostics != nullptr) {
    diagnostics->max_edge_amplitude = std::max(diagnostics->max_edge_amplitude, edge);
    diagnostics->boundary_leak = diagnostics->max_edge_amplitude > kBoundaryLeakWarning;
  }
  return out;
}

std::vector<double> region_weights(const PositionGrid& grid, double X, Side side) {
  if (!grid.interior(X)) throw DomainError("region projector: X outside the grid interior");
  const double dx = grid.spacing();
  std::vector<double> w(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) {
    double left = std::clamp((X - (grid.node(j) - 0.5 * dx)) / dx, 0.0, 1.0);
    if (std::abs(left - 0.5) < 1e-9) left = 0.5;
    w[j] = side == Side::left ? left : 1.0 - left;
  }
  return w;
}

GridWavefunction project_region(const GridWavefunction& psi, double X, Side side) {
  GridWavefunction out = psi.to_position();
  const auto w = region_weights(out.grid(), X, side);
  auto a = out.amplitudes();
  for (std::size_t j = 0; j < a.size(); ++j) a[j] *= w[j];
  return out;
}

std::size_t Dynamics::steps_for(double t) const {
  if (!(max_time_step > 0.0)) throw DomainError("dynamics: max_time_step must be positive");
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(std::abs(t) / max_time_step)));
}

GridWavefunction Dynamics::evolve(const GridWavefunction& psi, double t,
                                  EvolutionDiagnostics* diagnostics) const {
  if (t == 0.0) return psi;
  if (is_free()) return evolve_free(psi.to_momentum(), t).in(psi.representation());
  return evolve_potential(psi.to_position(), *potential, t, steps_for(t), diagnostics)
      .in(psi.representation());
}

}  // namespace weakarrival
