#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "oracles/gaussian_oracle.hpp"
#include "weakarrival/errors.hpp"
#include "weakarrival/potential.hpp"
#include "weakarrival/propagator.hpp"

using namespace weakarrival;

namespace {

const SimulationUnits kUnits{};

double max_diff(const GridWavefunction& a, const GridWavefunction& b) {
  const auto x = a.amplitudes(), y = b.amplitudes();
  double m = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) m = std::max(m, std::abs(x[i] - y[i]));
  return m;
}

GridWavefunction combine(const GridWavefunction& a, const GridWavefunction& b, Complex ca, Complex cb) {
  std::vector<Complex> v(a.amplitudes().size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = ca * a.amplitudes()[i] + cb * b.amplitudes()[i];
  return GridWavefunction(a.grid(), a.units(), a.representation(), std::move(v));
}

double position_width(const GridWavefunction& psi) {
  const auto a = psi.amplitudes();
  double m0 = 0, m1 = 0, m2 = 0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double x = psi.grid().node(j), w = std::norm(a[j]);
    m0 += w;
    m1 += w * x;
    m2 += w * x * x;
  }
  const double mean = m1 / m0;
  return std::sqrt(m2 / m0 - mean * mean);
}

}  // namespace

TEST(Grid, DualSpacingIsExact) {
  const PositionGrid g(-10.0, 30.0, 256);
  const SimulationUnits u{0.7, 2.0};
  const MomentumGrid p(g, u);
  EXPECT_DOUBLE_EQ(g.spacing(), 40.0 / 256.0);
  EXPECT_DOUBLE_EQ(p.spacing(), 2.0 * std::numbers::pi * 0.7 / (256.0 * g.spacing()));
  EXPECT_DOUBLE_EQ(p.node(128), 0.0);
}

TEST(Grid, RejectsBadShapes) {
  EXPECT_THROW(PositionGrid(0.0, 1.0, 100), DomainError);
  EXPECT_THROW(PositionGrid(0.0, 1.0, 1), DomainError);
  EXPECT_THROW(PositionGrid(1.0, 1.0, 64), DomainError);
  EXPECT_THROW((SimulationUnits{0.0, 1.0}.validate()), DomainError);
  EXPECT_THROW((GaussianPacket{0.0, 0.0, -1.0}.validate()), DomainError);
}

TEST(Grid, SampledPacketIsNormalized) {
  const GaussianPacket pk{1.0, 2.0, 1.5};
  const GridWavefunction psi = pk.sample(PositionGrid(-11.0, 13.0, 1024), kUnits);
  EXPECT_NEAR(psi.norm(), 1.0, 1e-9);
}

TEST(Grid, FourierRoundTrip) {
  const GridWavefunction psi = GaussianPacket{-3.0, 1.7, 0.8}.sample(PositionGrid(-20.0, 20.0, 1024), kUnits);
  const GridWavefunction back = psi.to_momentum().to_position();
  EXPECT_LT(max_diff(psi, back), 1e-12);
  EXPECT_NEAR(psi.to_momentum().norm(), 1.0, 1e-12);
}

TEST(Grid, MomentumSamplesMatchAnalyticTransform) {
  const GaussianPacket pk{-3.0, 1.7, 0.8};
  const GridWavefunction phi = pk.sample(PositionGrid(-20.0, 20.0, 1024), kUnits).to_momentum();
  for (std::size_t k = 0; k < phi.amplitudes().size(); k += 7)
    ASSERT_LT(std::abs(phi.amplitudes()[k] - pk.momentum_amplitude(phi.coordinate(k), kUnits)), 1e-10);
}

TEST(Kernel, CoincidentPointsAtUnitTime) {
  const Complex k = free_propagator_kernel(0.3, 0.3, 1.0, kUnits);
  EXPECT_NEAR(k.real(), 0.28209479, 1e-8);
  EXPECT_NEAR(k.imag(), -0.28209479, 1e-8);
}

TEST(Kernel, ModulusIndependentOfPoints) {
  for (double x1 : {-5.0, 0.0, 2.5})
    for (double x2 : {-1.0, 3.0, 17.0})
      EXPECT_NEAR(std::abs(free_propagator_kernel(x1, x2, 1.0, kUnits)), 1.0 / std::sqrt(2.0 * std::numbers::pi),
                  1e-14);
}

TEST(Kernel, AdjointIsConjugateTranspose) {
  const Complex a = free_propagator_kernel_adjoint(0.4, -1.1, 0.7, kUnits);
  const Complex b = std::conj(free_propagator_kernel(-1.1, 0.4, 0.7, kUnits));
  EXPECT_LT(std::abs(a - b), 1e-15);
}

TEST(Kernel, SingularTime) {
  EXPECT_THROW(free_propagator_kernel(0.0, 1.0, 0.0, kUnits), SingularTimeError);
  EXPECT_THROW(free_propagator_kernel_adjoint(0.0, 1.0, 0.0, kUnits), SingularTimeError);
}

namespace {

// Trapezoid of kernel(x1, x2, t) f(x2) over a fine x2 grid.
template <class F>
Complex apply_kernel(double x1, double t, F&& f, double lo, double hi, int n) {
  const double h = (hi - lo) / n;
  Complex s = 0.0;
  for (int j = 0; j <= n; ++j) {
    const double x2 = lo + j * h;
    const double w = (j == 0 || j == n) ? 0.5 : 1.0;
    s += w * free_propagator_kernel(x1, x2, t, kUnits) * f(x2);
  }
  return s * h;
}

}  // namespace

TEST(Kernel, PropagatesGaussianAnalytically) {
  const double x0 = 0.0, p0 = 1.0, s = 1.0, t = 1.0;
  auto psi0 = [&](double x) { return oracle::free_gaussian(x, 0.0, x0, p0, s, 1.0, 1.0); };
  for (double x1 : {-2.0, 0.0, 0.7, 1.5, 3.0}) {
    const Complex num = apply_kernel(x1, t, psi0, -14.0, 14.0, 8000);
    EXPECT_LT(std::abs(num - oracle::free_gaussian(x1, t, x0, p0, s, 1.0, 1.0)), 1e-6) << x1;
  }
}

TEST(Kernel, ComposesOverHalfTimes) {
  // K(t) psi = K(t/2) K(t/2) psi on a smooth state, via nested quadrature.
  const double t = 1.0, s = 1.0;
  auto psi0 = [&](double x) { return oracle::free_gaussian(x, 0.0, 0.0, 0.5, s, 1.0, 1.0); };
  auto half = [&](double x) { return apply_kernel(x, t / 2.0, psi0, -12.0, 12.0, 2400); };
  for (double x1 : {-1.0, 0.5, 2.0}) {
    const Complex twice = apply_kernel(x1, t / 2.0, half, -14.0, 14.0, 2800);
    const Complex once = apply_kernel(x1, t, psi0, -12.0, 12.0, 4800);
    EXPECT_LT(std::abs(twice - once), 1e-6) << x1;
  }
}

TEST(EvolveFree, ZeroTimeIsIdentity) {
  const GridWavefunction phi = GaussianPacket{1.0, 2.0, 1.0}.sample(PositionGrid(-20, 20, 512), kUnits).to_momentum();
  EXPECT_EQ(max_diff(evolve_free(phi, 0.0), phi), 0.0);
}

TEST(EvolveFree, PreservesNorm) {
  const GridWavefunction phi = GaussianPacket{1.0, 2.0, 1.0}.sample(PositionGrid(-20, 20, 512), kUnits).to_momentum();
  for (double t : {0.1, 3.0, -7.5, 1e3}) EXPECT_NEAR(evolve_free(phi, t).norm(), 1.0, 1e-12);
}

TEST(EvolveFree, RequiresMomentumRepresentation) {
  const GridWavefunction psi = GaussianPacket{}.sample(PositionGrid(-20, 20, 512), kUnits);
  EXPECT_THROW(evolve_free(psi, 1.0), DomainError);
}

TEST(EvolveFree, WidthFollowsSpreadingLaw) {
  const GaussianPacket pk{-2.0, 1.0, 0.8};
  const GridWavefunction psi = pk.sample(PositionGrid(-30.0, 30.0, 2048), kUnits);
  const GridWavefunction out = evolve_free(psi.to_momentum(), 2.0).to_position();
  EXPECT_NEAR(position_width(out), oracle::free_width(2.0, 0.8, 1.0, 1.0), 1e-6);
  EXPECT_NEAR(pk.sigma_x_at(2.0, kUnits), oracle::free_width(2.0, 0.8, 1.0, 1.0), 1e-12);
}

TEST(EvolveFree, MatchesAnalyticGaussianPointwise) {
  const GaussianPacket pk{-2.0, 1.0, 0.8};
  const PositionGrid g(-30.0, 30.0, 2048);
  const GridWavefunction out = evolve_free(pk.sample(g, kUnits).to_momentum(), 2.0).to_position();
  for (std::size_t j = 0; j < g.size(); j += 5)
    ASSERT_LT(std::abs(out.amplitudes()[j] - oracle::free_gaussian(g.node(j), 2.0, -2.0, 1.0, 0.8, 1.0, 1.0)), 1e-10);
}

TEST(EvolvePotential, ZeroPotentialMatchesFree) {
  const PositionGrid g(-30.0, 30.0, 1024);
  const GridWavefunction psi = GaussianPacket{-2.0, 1.0, 1.0}.sample(g, kUnits);
  const GridWavefunction a = evolve_potential(psi, PotentialSpec::zero(g), 2.5, 17);
  const GridWavefunction b = evolve_free(psi.to_momentum(), 2.5).to_position();
  EXPECT_LT(max_diff(a, b), 1e-9);
}

TEST(EvolvePotential, HarmonicFullPeriodReturns) {
  const PositionGrid g(-20.0, 20.0, 1024);
  const GridWavefunction psi = GaussianPacket{2.0, 0.5, 0.9}.sample(g, kUnits);
  const double period = 2.0 * std::numbers::pi;
  EvolutionDiagnostics diag;
  const GridWavefunction out = evolve_potential(psi, PotentialSpec::harmonic(g, 1.0), period, 4000, &diag);
  EXPECT_NEAR(out.norm(), 1.0, 1e-9);
  const Complex overlap = psi.inner_product(out);
  const GridWavefunction aligned = combine(out, out, std::polar(1.0, -std::arg(overlap)), 0.0);
  EXPECT_LT(max_diff(aligned, psi), 1e-4);
  EXPECT_FALSE(diag.boundary_leak);
}

TEST(EvolvePotential, StrangIsSecondOrder) {
  const PositionGrid g(-20.0, 20.0, 512);
  const GridWavefunction psi = GaussianPacket{1.0, 1.0, 1.0}.sample(g, kUnits);
  const PotentialSpec V = PotentialSpec::harmonic(g, 1.0);
  auto run = [&](std::size_t n) { return evolve_potential(psi, V, 1.0, n); };
  const GridWavefunction r80 = run(80), r160 = run(160);
  const GridWavefunction ref = combine(r160, r80, 4.0 / 3.0, -1.0 / 3.0);
  const double e10 = max_diff(run(10), ref), e20 = max_diff(run(20), ref);
  EXPECT_NEAR(e10 / e20, 4.0, 0.8);
}

TEST(EvolvePotential, UnitarityOverManySteps) {
  const PositionGrid g(-20.0, 20.0, 512);
  const GridWavefunction psi = GaussianPacket{1.0, 1.0, 1.0}.sample(g, kUnits);
  EXPECT_NEAR(evolve_potential(psi, PotentialSpec::harmonic(g, 3.0), 5.0, 999).norm(), 1.0, 1e-9);
}

TEST(EvolvePotential, FlagsBoundaryLeak) {
  const PositionGrid g(-10.0, 10.0, 256);
  const GridWavefunction psi = GaussianPacket{6.0, 8.0, 0.5}.sample(g, kUnits);
  EvolutionDiagnostics diag;
  (void)evolve_potential(psi, PotentialSpec::zero(g), 1.0, 10, &diag);
  EXPECT_TRUE(diag.boundary_leak);
  EXPECT_GT(diag.max_edge_amplitude, kBoundaryLeakWarning);
}

TEST(EvolvePotential, RejectsZeroSteps) {
  const PositionGrid g(-10.0, 10.0, 256);
  const GridWavefunction psi = GaussianPacket{}.sample(g, kUnits);
  EXPECT_THROW(evolve_potential(psi, PotentialSpec::zero(g), 1.0, 0), DomainError);
}

TEST(Project, CompletenessIsExact) {
  const PositionGrid g(-20.0, 20.0, 512);
  const GridWavefunction psi = GaussianPacket{0.0, 1.0, 2.0}.sample(g, kUnits);
  for (double X : {0.0, 0.013, g.node(300), -7.77}) {
    const GridWavefunction l = project_region(psi, X, Side::left), r = project_region(psi, X, Side::right);
    EXPECT_LT(max_diff(combine(l, r, 1.0, 1.0), psi), 1e-12) << X;
  }
}

TEST(Project, NodeOnBoundaryGetsHalfWeight) {
  const PositionGrid g(-20.0, 20.0, 512);
  const auto w = region_weights(g, g.node(256), Side::left);
  EXPECT_DOUBLE_EQ(w[256], 0.5);
  EXPECT_DOUBLE_EQ(w[255], 1.0);
  EXPECT_DOUBLE_EQ(w[257], 0.0);
}

TEST(Project, IdempotentWhenBoundaryOnCellFace) {
  const PositionGrid g(-20.0, 20.0, 512);
  const GridWavefunction psi = GaussianPacket{0.0, 1.0, 2.0}.sample(g, kUnits);
  const double X = g.node(256) + 0.5 * g.spacing();
  for (Side s : {Side::left, Side::right}) {
    const GridWavefunction once = project_region(psi, X, s);
    EXPECT_LT(max_diff(project_region(once, X, s), once), 1e-15);
  }
}

TEST(Project, FarLeftPacketUnchanged) {
  const PositionGrid g(-40.0, 20.0, 1024);
  const GridWavefunction psi = GaussianPacket{-15.0, 0.0, 1.0}.sample(g, kUnits);
  EXPECT_LT(std::abs(project_region(psi, 0.0, Side::left).norm() - 1.0), 1e-8);
}

TEST(Project, RejectsBoundaryOutsideGrid) {
  const PositionGrid g(-20.0, 20.0, 512);
  const GridWavefunction psi = GaussianPacket{}.sample(g, kUnits);
  EXPECT_THROW(project_region(psi, 25.0, Side::left), DomainError);
}

TEST(Dynamics, FreeAndPotentialPathsAgreeForZeroTable) {
  const PositionGrid g(-30.0, 30.0, 1024);
  const GridWavefunction psi = GaussianPacket{-2.0, 1.0, 1.0}.sample(g, kUnits);
  const PotentialSpec zero = PotentialSpec::zero(g);
  EXPECT_TRUE((Dynamics{&zero}.is_free()));
  EXPECT_LT(max_diff(Dynamics{&zero}.evolve(psi, 3.0), Dynamics{}.evolve(psi, 3.0)), 1e-12);
}
