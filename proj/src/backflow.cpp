#include "weakarrival/backflow.hpp"

#include <cmath>
#include <numbers>

#include "weakarrival/errors.hpp"
#include "worker_pool.hpp"

namespace weakarrival {

GridWavefunction TwoGaussianState::sample(const PositionGrid& grid, const SimulationUnits& units) const {
  const GaussianPacket a{x0, pa, sigma_x}, b{x0, pb, sigma_x};
  a.validate();
  b.validate();
  const Complex mix = std::polar(ratio, phase);
  std::vector<Complex> amp(grid.size());
  for (std::size_t j = 0; j < amp.size(); ++j) {
    const double x = grid.node(j);
    amp[j] = a.position_amplitude(x, units) + mix * b.position_amplitude(x, units);
  }
  return GridWavefunction(grid, units, Representation::position, std::move(amp)).normalized();
}

namespace {

double negative_weight(const GridWavefunction& psi) {
  const GridWavefunction p = psi.to_momentum();
  const auto a = p.amplitudes();
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k)
    if (p.coordinate(k) < 0.0) s += std::norm(a[k]);
  return s * p.measure();
}

}  // namespace

BackflowCandidate scan_backflow(const BackflowScanConfig& cfg, const SimulationUnits& units, unsigned jobs) {
  if (cfg.phases < 1 || cfg.times.empty()) throw DomainError("backflow scan: empty phase or time grid");
  ArrivalConfig a;
  a.X = cfg.X;
  a.dt = cfg.dt;
  a.units = units;
  a.validate();
  const double x0 = cfg.state.x0;
  const PositionGrid grid(x0 - cfg.half_width, x0 + cfg.half_width, cfg.n);
  const std::size_t total = cfg.phases * cfg.times.size();
  std::vector<BackflowCandidate> results(total);
  detail::parallel_for(total, jobs, [&](std::size_t idx) {
    TwoGaussianState s = cfg.state;
    s.phase = 2.0 * std::numbers::pi * static_cast<double>(idx / cfg.times.size()) /
              static_cast<double>(cfg.phases);
    const double t = cfg.times[idx % cfg.times.size()];
    const GridWavefunction psi = Dynamics{}.evolve(s.sample(grid, units), t);
    results[idx] = {s.phase, t, expectation_pi(psi, a).pi1, 0.0, 0.0};
  });
  BackflowCandidate best = results.front();
  for (const auto& r : results)
    if (r.pi1 < best.pi1) best = r;

  // Error bar at the winning point only.
  TwoGaussianState s = cfg.state;
  s.phase = best.phase;
  const GridWavefunction psi = Dynamics{}.evolve(s.sample(grid, units), best.t);
  const PositionGrid fine(grid.min(), grid.max(), 2 * cfg.n);
  const GridWavefunction psi_fine = Dynamics{}.evolve(s.sample(fine, units), best.t);
  best.error = std::abs(expectation_pi(psi_fine, a).pi1 - best.pi1) +
               std::abs(expectation_pi_grid(psi, a).pi1 - best.pi1);
  best.negative_momentum_weight = negative_weight(psi);
  return best;
}

}  // namespace weakarrival
