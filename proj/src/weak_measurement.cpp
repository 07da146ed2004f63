#include "weakarrival/weak_measurement.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "weakarrival/errors.hpp"
#include "worker_pool.hpp"

namespace weakarrival {

void CouplingConfig::validate() const {
  if (!std::isfinite(lambda) || !std::isfinite(tau)) throw DomainError("coupling: non-finite lambda or tau");
  if (tau < 0.0) throw DomainError("coupling: tau must be non-negative");
}

JointState::JointState(PositionGrid x_grid, PositionGrid q_grid, SimulationUnits units,
                       std::vector<Complex> amplitudes, double initial_mean_pq)
    : x_grid_(x_grid), q_grid_(q_grid), units_(units), amp_(std::move(amplitudes)),
      initial_mean_pq_(initial_mean_pq) {
  if (amp_.size() != x_grid_.size() * q_grid_.size())
    throw DomainError("joint state: amplitude count does not match grids");
}

double JointState::norm() const {
  double s = 0.0;
  for (const auto& a : amp_) s += std::norm(a);
  return std::sqrt(s * x_grid_.spacing() * q_grid_.spacing());
}

std::vector<double> JointState::particle_marginal() const {
  const std::size_t nq = q_grid_.size();
  std::vector<double> out(x_grid_.size(), 0.0);
  for (std::size_t j = 0; j < out.size(); ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < nq; ++i) s += std::norm(amp_[j * nq + i]);
    out[j] = s * q_grid_.spacing();
  }
  return out;
}

std::vector<double> JointState::detector_marginal() const {
  const std::size_t nq = q_grid_.size();
  std::vector<double> out(nq, 0.0);
  for (std::size_t j = 0; j < x_grid_.size(); ++j)
    for (std::size_t i = 0; i < nq; ++i) out[i] += std::norm(amp_[j * nq + i]);
  for (auto& v : out) v *= x_grid_.spacing();
  return out;
}

namespace {

constexpr double kFactorNormTolerance = 1e-6;

// sum_j w_j |Psi(x_j, p_q)|^2 dx per p_q node. The region weights enter the
// probability linearly (<P2>, not <P2^2>), which matters on the node that
// straddles X where the weight is fractional.
std::vector<double> momentum_histogram(std::span<const Complex> amp, const PositionGrid& x_grid,
                                       const PositionGrid& q_grid, const SimulationUnits& units,
                                       const std::vector<double>* weights) {
  const std::size_t nq = q_grid.size();
  std::vector<double> hist(nq, 0.0);
  std::vector<Complex> row(nq);
  for (std::size_t j = 0; j < x_grid.size(); ++j) {
    const double w = weights ? (*weights)[j] : 1.0;
    if (w == 0.0) continue;
    double row_norm = 0.0;
    for (std::size_t i = 0; i < nq; ++i) {
      row[i] = amp[j * nq + i];
      row_norm += std::norm(row[i]);
    }
    if (row_norm == 0.0) continue;
    const GridWavefunction p = GridWavefunction(q_grid, units, Representation::position, row).to_momentum();
    const auto a = p.amplitudes();
    for (std::size_t k = 0; k < nq; ++k) hist[k] += w * std::norm(a[k]);
  }
  for (auto& v : hist) v *= x_grid.spacing();
  return hist;
}

double histogram_mean(const std::vector<double>& hist, const MomentumGrid& pg, double measure) {
  double s = 0.0;
  for (std::size_t k = 0; k < hist.size(); ++k) s += pg.node(k) * hist[k];
  return s * measure;
}

double histogram_mass(const std::vector<double>& hist, double measure) {
  double s = 0.0;
  for (double v : hist) s += v;
  return s * measure;
}

// Evolves every q column of the particle factor by t.
std::vector<Complex> evolve_particle(const JointState& js, double t, const Dynamics& dynamics) {
  const std::size_t nx = js.x_grid().size(), nq = js.q_grid().size();
  std::vector<Complex> out(js.amplitudes().begin(), js.amplitudes().end());
  std::vector<Complex> column(nx);
  for (std::size_t i = 0; i < nq; ++i) {
    double col_norm = 0.0;
    for (std::size_t j = 0; j < nx; ++j) {
      column[j] = out[j * nq + i];
      col_norm += std::norm(column[j]);
    }
    if (col_norm == 0.0) continue;
    const GridWavefunction evolved =
        dynamics.evolve(GridWavefunction(js.x_grid(), js.units(), Representation::position, column), t)
            .to_position();
    const auto a = evolved.amplitudes();
    for (std::size_t j = 0; j < nx; ++j) out[j * nq + i] = a[j];
  }
  return out;
}

struct Postselected {
  std::vector<double> histogram;  // W(p_q, 2) per p_q node
  MomentumGrid pg;
  double measure;
};

Postselected postselected_histogram(const JointState& js, const ArrivalConfig& cfg, const Dynamics& dynamics) {
  cfg.validate();
  const std::vector<Complex> evolved = evolve_particle(js, cfg.dt, dynamics);
  const std::vector<double> keep = region_weights(js.x_grid(), cfg.X, Side::right);
  const MomentumGrid pg(js.q_grid(), js.units());
  return {momentum_histogram(evolved, js.x_grid(), js.q_grid(), js.units(), &keep), pg,
          pg.spacing() / (2.0 * std::numbers::pi * js.units().hbar)};
}

}  // namespace

double JointState::mean_detector_momentum() const {
  const std::vector<double> hist = momentum_histogram(amp_, x_grid_, q_grid_, units_, nullptr);
  const MomentumGrid pg(q_grid_, units_);
  return histogram_mean(hist, pg, pg.spacing() / (2.0 * std::numbers::pi * units_.hbar));
}

JointState prepare_joint(const GridWavefunction& psi_in, const DetectorState& det) {
  const GridWavefunction psi = psi_in.to_position();
  if (!(std::abs(psi.norm() - 1.0) <= kFactorNormTolerance))
    throw NormalizationError("prepare_joint: particle state is not normalized");
  if (!(psi.units() == det.units())) throw DomainError("prepare_joint: particle and detector units differ");
  const auto x = psi.amplitudes();
  const auto q = det.wavefunction().amplitudes();
  std::vector<Complex> amp(x.size() * q.size());
  for (std::size_t j = 0; j < x.size(); ++j)
    for (std::size_t i = 0; i < q.size(); ++i) amp[j * q.size() + i] = x[j] * q[i];
  return JointState(psi.grid(), det.grid(), psi.units(), std::move(amp), det.mean_pq());
}

JointState apply_interaction(const JointState& js, const ArrivalConfig& cfg, const CouplingConfig& cc) {
  cfg.validate();
  cc.validate();
  JointState out = js;
  const double g = cc.strength() / js.units().hbar;
  out.add_coupling(cc.strength());
  if (g == 0.0) return out;
  const std::vector<double> w1 = region_weights(js.x_grid(), cfg.X, Side::left);
  const std::size_t nq = js.q_grid().size();
  auto amp = out.amplitudes();
  for (std::size_t j = 0; j < w1.size(); ++j) {
    if (w1[j] == 0.0) continue;
    for (std::size_t i = 0; i < nq; ++i) amp[j * nq + i] *= std::polar(1.0, -g * w1[j] * js.q_grid().node(i));
  }
  return out;
}

WeakMeasurementOutcome postselect(const JointState& js, const ArrivalConfig& cfg, const Dynamics& dynamics) {
  const double g = js.applied_coupling();
  if (g == 0.0) throw DegenerateCouplingError("postselect: lambda*tau = 0, weak values undefined");
  const Postselected post = postselected_histogram(js, cfg, dynamics);

  WeakMeasurementOutcome o;
  o.w2 = histogram_mass(post.histogram, post.measure);
  if (!(o.w2 >= kPostselectionThreshold)) throw PostselectionError(o.w2);
  const double p0 = js.initial_mean_pq();
  const double weighted = histogram_mean(post.histogram, post.pg, post.measure);  // <p_q>_2 W(2)
  o.mean_pq_conditional = weighted / o.w2;
  o.mean_pq_unconditional = js.mean_detector_momentum();
  o.w1 = (p0 - o.mean_pq_unconditional) / g;
  o.w1_given_2 = (p0 * o.w2 - weighted) / (g * o.w2);
  o.w12 = o.w2 * o.w1_given_2;
  return o;
}

ConditionalDistribution conditional_momentum_distribution(const JointState& js, const ArrivalConfig& cfg,
                                                          const Dynamics& dynamics) {
  const Postselected post = postselected_histogram(js, cfg, dynamics);
  const double w2 = histogram_mass(post.histogram, post.measure);
  if (!(w2 >= kPostselectionThreshold)) throw PostselectionError(w2);
  ConditionalDistribution d;
  d.measure = post.measure;
  d.momentum.resize(post.histogram.size());
  d.density.resize(post.histogram.size());
  for (std::size_t k = 0; k < post.histogram.size(); ++k) {
    d.momentum[k] = post.pg.node(k);
    d.density[k] = post.histogram[k] / w2;
  }
  return d;
}

std::vector<double> sample_readouts(const ConditionalDistribution& dist, std::size_t n, std::uint64_t seed) {
  if (dist.density.empty()) throw DomainError("sample_readouts: empty distribution");
  std::mt19937_64 rng(seed);
  std::discrete_distribution<std::size_t> pick(dist.density.begin(), dist.density.end());
  std::vector<double> out(n);
  for (auto& v : out) v = dist.momentum[pick(rng)];
  return out;
}

std::vector<SweepPoint> run_protocol_sweep(const GridWavefunction& psi, const DetectorState& det,
                                           const ArrivalConfig& cfg, const CouplingConfig& cc,
                                           const std::vector<double>& times, const Dynamics& dynamics,
                                           unsigned jobs) {
  if (times.empty()) throw DomainError("sweep: no times given");
  if (!std::is_sorted(times.begin(), times.end())) throw DomainError("sweep: times must be increasing");
  cfg.validate();
  cc.validate();
  std::vector<SweepPoint> out(times.size());
  detail::parallel_for(times.size(), jobs, [&](std::size_t idx) {
    SweepPoint& pt = out[idx];
    pt.t = times[idx];
    try {
      const GridWavefunction psi_t = dynamics.evolve(psi.to_position(), times[idx]);
      const JointState joint = apply_interaction(prepare_joint(psi_t, det), cfg, cc);
      pt.outcome = postselect(joint, cfg, dynamics);
    } catch (const PostselectionError& e) {
      pt.status = SweepStatus::postselection_failed;
      pt.message = e.what();
    } catch (const DegenerateCouplingError& e) {
      pt.status = SweepStatus::degenerate_coupling;
      pt.message = e.what();
    }
  });
  return out;
}

}  // namespace weakarrival
