#include "weakarrival/classical.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include "weakarrival/errors.hpp"
#include "worker_pool.hpp"

namespace weakarrival {

namespace {

constexpr std::size_t kBlocks = 10;
constexpr double kEnergyDriftTolerance = 1e-6;
constexpr std::size_t kMaxSteps = 1'000'000;
constexpr double kInitialStep = 1e-2;

// Uniform on (0, 1] from the top 53 bits.
double uniform_open_closed(std::mt19937_64& rng) {
  return (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53;
}

struct Trajectory {
  double x, p;
};

double energy(const Trajectory& s, double mass, const PotentialSpec& V) {
  return s.p * s.p / (2.0 * mass) + V.value_at(s.x);
}

struct VerletResult {
  Trajectory end;
  double max_drift;  ///< max |E(t') - E(0)| over the steps
};

VerletResult verlet(Trajectory s, double t, std::size_t steps, double mass, const PotentialSpec& V) {
  const double h = t / static_cast<double>(steps);
  const double e0 = energy(s, mass, V);
  double f = V.force_at(s.x);
  double drift = 0.0;
  for (std::size_t k = 0; k < steps; ++k) {
    const double p_half = s.p + 0.5 * h * f;
    s.x += h * p_half / mass;
    f = V.force_at(s.x);
    s.p = p_half + 0.5 * h * f;
    drift = std::max(drift, std::abs(energy(s, mass, V) - e0));
  }
  return {s, drift};
}

Trajectory integrate(Trajectory s, double t, double mass, const PotentialSpec& V) {
  const double e0 = energy(s, mass, V);
  // Drift relative to the energy scale of the trajectory.
  const double scale = std::max(std::abs(e0), s.p * s.p / (2.0 * mass) + std::abs(V.value_at(s.x)));
  std::size_t steps = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(t / kInitialStep)));
  while (true) {
    const VerletResult r = verlet(s, t, steps, mass, V);
    if (r.max_drift <= kEnergyDriftTolerance * scale) return r.end;
    if (steps > kMaxSteps / 2)
      throw NumericalError("evolve_ensemble: energy drift bound not reached within 1e6 steps");
    steps *= 2;
  }
}

bool is_free(const PotentialSpec* potential) { return potential == nullptr || potential->is_zero(); }

struct BlockStats {
  double mean;
  double error;
};

// Mean over all samples and the standard error from kBlocks contiguous blocks.
template <class F>
BlockStats block_average(std::size_t n, F&& value) {
  std::array<double, kBlocks> sums{};
  std::array<std::size_t, kBlocks> counts{};
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t b = std::min(kBlocks - 1, i * kBlocks / n);
    sums[b] += value(i);
    ++counts[b];
  }
  double total = 0.0;
  std::size_t used = 0;
  std::array<double, kBlocks> means{};
  for (std::size_t b = 0; b < kBlocks; ++b) {
    total += sums[b];
    if (counts[b] > 0) means[used++] = sums[b] / static_cast<double>(counts[b]);
  }
  const double mean = total / static_cast<double>(n);
  if (used < 2) return {mean, 0.0};
  double bm = 0.0;
  for (std::size_t b = 0; b < used; ++b) bm += means[b];
  bm /= static_cast<double>(used);
  double var = 0.0;
  for (std::size_t b = 0; b < used; ++b) var += (means[b] - bm) * (means[b] - bm);
  var /= static_cast<double>(used - 1);
  return {mean, std::sqrt(var / static_cast<double>(used))};
}

void require_nonempty(const PhaseSpaceEnsemble& ens) {
  if (ens.samples.empty()) throw DomainError("classical: empty ensemble");
}

}  // namespace

PhaseSpaceEnsemble sample_gaussian_ensemble(double x0, double p0, double sigma_x, double sigma_p,
                                            std::size_t n, std::uint64_t seed) {
  if (!(std::isfinite(sigma_x) && sigma_x > 0.0) || !(std::isfinite(sigma_p) && sigma_p > 0.0))
    throw DomainError("ensemble: widths must be positive");
  if (!std::isfinite(x0) || !std::isfinite(p0)) throw DomainError("ensemble: non-finite center");
  if (n < 1) throw DomainError("ensemble: need at least one sample");
  std::mt19937_64 rng(seed);
  PhaseSpaceEnsemble ens;
  ens.seed = seed;
  ens.samples.resize(n);
  for (auto& s : ens.samples) {
    const double r = std::sqrt(-2.0 * std::log(uniform_open_closed(rng)));
    const double phi = 2.0 * std::numbers::pi * uniform_open_closed(rng);
    s.x = x0 + sigma_x * r * std::cos(phi);
    s.p = p0 + sigma_p * r * std::sin(phi);
  }
  return ens;
}

PhaseSpaceEnsemble evolve_ensemble(const PhaseSpaceEnsemble& ens, double t, const SimulationUnits& units,
                                   const PotentialSpec* potential, unsigned jobs) {
  units.validate();
  if (!(std::isfinite(t) && t >= 0.0)) throw DomainError("evolve_ensemble: t must be >= 0");
  PhaseSpaceEnsemble out = ens;
  if (t == 0.0) return out;
  if (is_free(potential)) {
    for (auto& s : out.samples) s.x += s.p * t / units.mass;
    return out;
  }
  detail::parallel_for(out.samples.size(), jobs, [&](std::size_t i) {
    auto& s = out.samples[i];
    const Trajectory end = integrate({s.x, s.p}, t, units.mass, *potential);
    s = {end.x, end.p};
  });
  return out;
}

double silverman_bandwidth(const PhaseSpaceEnsemble& ens) {
  require_nonempty(ens);
  const std::size_t n = ens.samples.size();
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = ens.samples[i].x;
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double v : x) var += (v - mean) * (v - mean);
  const double sd = n > 1 ? std::sqrt(var / static_cast<double>(n - 1)) : 0.0;
  std::sort(x.begin(), x.end());
  const auto quantile = [&](double q) {
    const double pos = q * static_cast<double>(n - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, n - 1);
    return x[lo] + (pos - static_cast<double>(lo)) * (x[hi] - x[lo]);
  };
  const double iqr = quantile(0.75) - quantile(0.25);
  double spread = std::min(sd, iqr / 1.34);
  if (!(spread > 0.0)) spread = std::max(sd, iqr / 1.34);
  if (!(spread > 0.0)) throw DomainError("silverman_bandwidth: ensemble has no spread in x");
  return 0.9 * spread * std::pow(static_cast<double>(n), -0.2);
}

ArrivalDensity flux_at(const PhaseSpaceEnsemble& ens, double X, const SimulationUnits& units, double bandwidth) {
  require_nonempty(ens);
  units.validate();
  const double h = bandwidth > 0.0 ? bandwidth : silverman_bandwidth(ens);
  const double norm = 1.0 / (std::sqrt(2.0 * std::numbers::pi) * h);
  const auto kernel = [&](double x) {
    const double u = (x - X) / h;
    return norm * std::exp(-0.5 * u * u);
  };
  const std::size_t n = ens.samples.size();
  const auto& s = ens.samples;
  const auto plus = block_average(n, [&](std::size_t i) {
    return s[i].p > 0.0 ? s[i].p / units.mass * kernel(s[i].x) : 0.0;
  });
  const auto minus = block_average(n, [&](std::size_t i) {
    return s[i].p < 0.0 ? -s[i].p / units.mass * kernel(s[i].x) : 0.0;
  });
  const auto net = block_average(n, [&](std::size_t i) { return s[i].p / units.mass * kernel(s[i].x); });
  ArrivalDensity d;
  d.pi_plus = plus.mean;
  d.pi_minus = minus.mean;
  d.j = d.pi_plus - d.pi_minus;
  d.mc_error = plus.error;
  d.pi_minus_error = minus.error;
  d.j_error = net.error;
  d.bandwidth = h;
  return d;
}

ArrivalDensity arrival_density(const PhaseSpaceEnsemble& ens, double X, double t, const SimulationUnits& units,
                               const PotentialSpec* potential, double bandwidth) {
  if (!(bandwidth >= 0.0)) throw DomainError("arrival_density: bandwidth must be positive (0 = automatic)");
  return flux_at(evolve_ensemble(ens, t, units, potential), X, units, bandwidth);
}

WindowArrival arrival_probability_window(const PhaseSpaceEnsemble& ens, double X, double t, double dt,
                                         const SimulationUnits& units, const PotentialSpec* potential,
                                         unsigned jobs) {
  require_nonempty(ens);
  if (!(std::isfinite(dt) && dt > 0.0)) throw DomainError("arrival window: dt must be positive");
  const std::size_t n = ens.samples.size();
  std::vector<double> before(n), after(n);
  if (is_free(potential)) {
    units.validate();
    if (!(std::isfinite(t) && t >= 0.0)) throw DomainError("arrival window: t must be >= 0");
    for (std::size_t i = 0; i < n; ++i) {
      const auto& s = ens.samples[i];
      before[i] = s.x + s.p * t / units.mass;
      after[i] = before[i] + s.p * dt / units.mass;
    }
  } else {
    const PhaseSpaceEnsemble at_t = evolve_ensemble(ens, t, units, potential, jobs);
    const PhaseSpaceEnsemble later = evolve_ensemble(at_t, dt, units, potential, jobs);
    for (std::size_t i = 0; i < n; ++i) {
      before[i] = at_t.samples[i].x;
      after[i] = later.samples[i].x;
    }
  }
  const auto plus = block_average(n, [&](std::size_t i) { return before[i] < X && after[i] > X ? 1.0 : 0.0; });
  const auto minus = block_average(n, [&](std::size_t i) { return before[i] > X && after[i] < X ? 1.0 : 0.0; });
  return {plus.mean / dt, minus.mean / dt, plus.error / dt, minus.error / dt};
}

double fraction_beyond(const PhaseSpaceEnsemble& ens, double X) {
  require_nonempty(ens);
  std::size_t count = 0;
  for (const auto& s : ens.samples) count += s.x > X ? 1 : 0;
  return static_cast<double>(count) / static_cast<double>(ens.samples.size());
}

}  // namespace weakarrival
