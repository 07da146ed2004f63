#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "weakarrival/classical.hpp"
#include "weakarrival/errors.hpp"
#include "weakarrival/potential.hpp"

using namespace weakarrival;

namespace {

const SimulationUnits kUnits{};

struct Moments {
  double mx = 0, mp = 0, vx = 0, vp = 0, cxp = 0;
};

Moments moments(const PhaseSpaceEnsemble& e) {
  Moments m;
  const double n = static_cast<double>(e.samples.size());
  for (const auto& s : e.samples) {
    m.mx += s.x / n;
    m.mp += s.p / n;
  }
  for (const auto& s : e.samples) {
    m.vx += (s.x - m.mx) * (s.x - m.mx) / n;
    m.vp += (s.p - m.mp) * (s.p - m.mp) / n;
    m.cxp += (s.x - m.mx) * (s.p - m.mp) / n;
  }
  return m;
}

// Deterministic uniform-in-x ensemble on [a, b] with a fixed momentum.
PhaseSpaceEnsemble uniform_x(double a, double b, double p, std::size_t n) {
  PhaseSpaceEnsemble e;
  e.seed = 0;
  for (std::size_t i = 0; i < n; ++i)
    e.samples.push_back({a + (b - a) * (static_cast<double>(i) + 0.5) / static_cast<double>(n), p});
  return e;
}

}  // namespace

TEST(Sampling, DeltaLimit) {
  const PhaseSpaceEnsemble e = sample_gaussian_ensemble(1.5, -2.0, 1e-12, 1e-12, 1, 4);
  ASSERT_EQ(e.samples.size(), 1u);
  EXPECT_NEAR(e.samples[0].x, 1.5, 1e-10);
  EXPECT_NEAR(e.samples[0].p, -2.0, 1e-10);
  EXPECT_EQ(e.weight(), 1.0);
  EXPECT_EQ(e.seed, 4u);
}

TEST(Sampling, MeansAndCovariance) {
  const std::size_t n = 100000;
  const PhaseSpaceEnsemble e = sample_gaussian_ensemble(-10.0, 2.0, 1.0, 0.5, n, 1);
  const Moments m = moments(e);
  EXPECT_LT(std::abs(m.mx + 10.0), 4.0 * 1.0 / std::sqrt(n));
  EXPECT_LT(std::abs(m.mp - 2.0), 4.0 * 0.5 / std::sqrt(n));
  EXPECT_NEAR(m.vx, 1.0, 0.05);
  EXPECT_NEAR(m.vp, 0.25, 0.05 * 0.25);
  EXPECT_LT(std::abs(m.cxp), 0.05 * 0.5);
  EXPECT_NEAR(e.weight() * static_cast<double>(n), 1.0, 1e-12);
}

TEST(Sampling, DomainErrors) {
  EXPECT_THROW(sample_gaussian_ensemble(0, 0, 0.0, 1.0, 10, 1), DomainError);
  EXPECT_THROW(sample_gaussian_ensemble(0, 0, 1.0, -1.0, 10, 1), DomainError);
  EXPECT_THROW(sample_gaussian_ensemble(0, 0, 1.0, 1.0, 0, 1), DomainError);
}

TEST(Sampling, DeterministicForSeed) {
  const PhaseSpaceEnsemble a = sample_gaussian_ensemble(0, 1, 1, 1, 1000, 42);
  const PhaseSpaceEnsemble b = sample_gaussian_ensemble(0, 1, 1, 1, 1000, 42);
  const PhaseSpaceEnsemble c = sample_gaussian_ensemble(0, 1, 1, 1, 1000, 43);
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    ASSERT_EQ(a.samples[i].x, b.samples[i].x);
    ASSERT_EQ(a.samples[i].p, b.samples[i].p);
  }
  EXPECT_NE(a.samples[0].x, c.samples[0].x);
}

TEST(Evolve, Ballistic) {
  PhaseSpaceEnsemble e;
  e.samples = {{0.0, 3.0}};
  const PhaseSpaceEnsemble out = evolve_ensemble(e, 2.0, kUnits);
  EXPECT_EQ(out.samples[0].x, 6.0);
  EXPECT_EQ(out.samples[0].p, 3.0);
}

TEST(Evolve, ZeroTimeIsIdentity) {
  const PhaseSpaceEnsemble e = sample_gaussian_ensemble(0, 1, 1, 1, 100, 2);
  const PositionGrid g(-20, 20, 512);
  const PotentialSpec V = PotentialSpec::harmonic(g, 1.0);
  for (const PotentialSpec* pot : {static_cast<const PotentialSpec*>(nullptr), &V}) {
    const PhaseSpaceEnsemble out = evolve_ensemble(e, 0.0, kUnits, pot);
    for (std::size_t i = 0; i < e.samples.size(); ++i) {
      ASSERT_EQ(out.samples[i].x, e.samples[i].x);
      ASSERT_EQ(out.samples[i].p, e.samples[i].p);
    }
  }
}

TEST(Evolve, HarmonicPeriodRecoversEnsemble) {
  const PositionGrid g(-20, 20, 512);
  const PotentialSpec V = PotentialSpec::harmonic(g, 1.0);
  const PhaseSpaceEnsemble e = sample_gaussian_ensemble(2.0, 0.5, 1.0, 0.5, 200, 3);
  const PhaseSpaceEnsemble out = evolve_ensemble(e, 2.0 * std::numbers::pi, kUnits, &V, 2);
  for (std::size_t i = 0; i < e.samples.size(); ++i) {
    ASSERT_NEAR(out.samples[i].x, e.samples[i].x, 1e-4);
    ASSERT_NEAR(out.samples[i].p, e.samples[i].p, 1e-4);
  }
}

TEST(Evolve, HarmonicQuarterPeriodMatchesAnalytic) {
  const PositionGrid g(-20, 20, 512);
  const PotentialSpec V = PotentialSpec::harmonic(g, 4.0);  // omega = 2
  PhaseSpaceEnsemble e;
  e.samples = {{1.0, 0.0}, {0.0, 2.0}};
  const double t = 0.3;
  const PhaseSpaceEnsemble out = evolve_ensemble(e, t, kUnits, &V);
  EXPECT_NEAR(out.samples[0].x, std::cos(2 * t), 1e-5);
  EXPECT_NEAR(out.samples[0].p, -2.0 * std::sin(2 * t), 1e-5);
  EXPECT_NEAR(out.samples[1].x, std::sin(2 * t), 1e-5);
}

TEST(Evolve, RejectsNegativeTime) {
  PhaseSpaceEnsemble e;
  e.samples = {{0.0, 1.0}};
  EXPECT_THROW(evolve_ensemble(e, -1.0, kUnits), DomainError);
}

TEST(Density, UniformFlux) {
  const double X = 0.5, L = 20.0, p0 = 1.7;
  const ArrivalDensity d = flux_at(uniform_x(X - L, X + L, p0, 40000), X, kUnits, 0.2);
  EXPECT_NEAR(d.pi_plus, p0 / (2.0 * L), 1e-3 * p0 / (2.0 * L));
  EXPECT_EQ(d.pi_minus, 0.0);
  EXPECT_EQ(d.j, d.pi_plus);
}

TEST(Density, UniformFluxRandomSamples) {
  const double X = 0.0, L = 10.0, p0 = 1.0;
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(X - L, X + L);
  PhaseSpaceEnsemble e;
  for (int i = 0; i < 50000; ++i) e.samples.push_back({u(rng), p0});
  const ArrivalDensity d = flux_at(e, X, kUnits, 0.5);
  EXPECT_GT(d.mc_error, 0.0);
  EXPECT_LT(std::abs(d.pi_plus - p0 / (2.0 * L)), 3.0 * d.mc_error);
}

TEST(Density, MomentumEigenstateSurrogate) {
  // Unit-density slab at X reproduces the classical line p/m.
  const double p0 = 1.0;
  const ArrivalDensity d = flux_at(uniform_x(-50.0, 50.0, p0, 100000), 0.0, kUnits, 0.5);
  EXPECT_NEAR(d.pi_plus * 100.0, p0 / kUnits.mass, 1e-3);
}

TEST(Density, NoSupportAtX) {
  const PhaseSpaceEnsemble e = sample_gaussian_ensemble(-30.0, 1.0, 1.0, 0.1, 20000, 9);
  const ArrivalDensity d = arrival_density(e, 0.0, 1.0, kUnits);
  EXPECT_LE(d.pi_plus, d.mc_error);
  EXPECT_LT(d.pi_plus, 1e-12);
}

TEST(Density, EmptyEnsemble) {
  EXPECT_THROW(flux_at(PhaseSpaceEnsemble{}, 0.0, kUnits), DomainError);
  EXPECT_THROW(silverman_bandwidth(PhaseSpaceEnsemble{}), DomainError);
}

TEST(Density, InvariantsHold) {
  const PhaseSpaceEnsemble e = sample_gaussian_ensemble(-2.0, 0.5, 1.0, 1.0, 50000, 10);
  const ArrivalDensity d = arrival_density(e, 0.0, 1.5, kUnits);
  EXPECT_GE(d.pi_plus, 0.0);
  EXPECT_GE(d.pi_minus, 0.0);
  EXPECT_GT(d.pi_minus, 0.0);
  EXPECT_NEAR(d.j, d.pi_plus - d.pi_minus, 1e-15);
  EXPECT_GT(d.bandwidth, 0.0);
  EXPECT_DOUBLE_EQ(d.bandwidth, silverman_bandwidth(evolve_ensemble(e, 1.5, kUnits)));
}

TEST(Density, FluxDecompositionMatchesFractionDerivative) {
  const std::size_t n = 200000;
  const PhaseSpaceEnsemble e = sample_gaussian_ensemble(-2.0, 1.0, 1.0, 0.5, n, 11);
  const double t = 2.0, h = 0.05, X = 0.0;
  const ArrivalDensity d = arrival_density(e, X, t, kUnits);
  const PhaseSpaceEnsemble a = evolve_ensemble(e, t - h, kUnits), b = evolve_ensemble(e, t + h, kUnits);
  const double fd = (fraction_beyond(b, X) - fraction_beyond(a, X)) / (2.0 * h);
  std::size_t crossers = 0;
  for (std::size_t i = 0; i < n; ++i)
    if ((a.samples[i].x > X) != (b.samples[i].x > X)) ++crossers;
  const double fd_err = std::sqrt(static_cast<double>(crossers)) / static_cast<double>(n) / (2.0 * h);
  EXPECT_LT(std::abs(d.j - fd), 3.0 * std::hypot(d.j_error, fd_err));
}

TEST(Density, TimeIntegralEqualsPositiveMomentumFraction) {
  const std::size_t n = 20000;
  const PhaseSpaceEnsemble e = sample_gaussian_ensemble(-10.0, 2.0, 1.0, 0.5, n, 12);
  double integral = 0.0;
  const double h = 0.1;
  for (int k = 0; k <= 400; ++k) {
    const double w = (k == 0 || k == 400) ? 0.5 : 1.0;
    integral += w * h * arrival_density(e, 0.0, k * h, kUnits).pi_plus;
  }
  std::size_t positive = 0;
  for (const auto& s : e.samples) positive += s.p > 0.0;
  EXPECT_NEAR(integral, static_cast<double>(positive) / n, 0.01);
}

TEST(Density, Deterministic) {
  const PhaseSpaceEnsemble a = sample_gaussian_ensemble(-3, 2, 1, 0.5, 5000, 77);
  const PhaseSpaceEnsemble b = sample_gaussian_ensemble(-3, 2, 1, 0.5, 5000, 77);
  const ArrivalDensity da = arrival_density(a, 0.0, 1.3, kUnits), db = arrival_density(b, 0.0, 1.3, kUnits);
  EXPECT_EQ(da.pi_plus, db.pi_plus);
  EXPECT_EQ(da.mc_error, db.mc_error);
  const WindowArrival wa = arrival_probability_window(a, 0.0, 1.3, 0.5, kUnits, nullptr, 1);
  const WindowArrival wb = arrival_probability_window(b, 0.0, 1.3, 0.5, kUnits, nullptr, 3);
  EXPECT_EQ(wa.pi_plus, wb.pi_plus);
  EXPECT_EQ(wa.pi_plus_error, wb.pi_plus_error);
}

TEST(Window, CountsCrossingsPerUnitTime) {
  PhaseSpaceEnsemble e;
  e.samples = {{-1.0, 2.0}, {-0.2, 1.0}, {-5.0, 1.0}, {0.5, -2.0}, {0.1, 1.0}};
  // dt = 1: samples 0 and 1 cross left to right, sample 3 crosses right to left.
  const WindowArrival w = arrival_probability_window(e, 0.0, 0.0, 1.0, kUnits);
  EXPECT_DOUBLE_EQ(w.pi_plus, 2.0 / 5.0);
  EXPECT_DOUBLE_EQ(w.pi_minus, 1.0 / 5.0);
}

TEST(Window, SmallDtApproachesInstantaneousFlux) {
  const PhaseSpaceEnsemble e = sample_gaussian_ensemble(-4.0, 2.0, 1.0, 0.5, 200000, 13);
  const ArrivalDensity d = arrival_density(e, 0.0, 2.0, kUnits);
  const WindowArrival w = arrival_probability_window(e, 0.0, 2.0, 0.02, kUnits);
  EXPECT_LT(std::abs(w.pi_plus - d.pi_plus), 3.0 * std::hypot(w.pi_plus_error, d.mc_error) + 0.01 * d.pi_plus);
}

TEST(Window, HarmonicPotential) {
  const PositionGrid g(-30, 30, 1024);
  const PotentialSpec V = PotentialSpec::harmonic(g, 1.0);
  // A packet released at rest at x = -3 crosses X = 0 at t = pi/2.
  const PhaseSpaceEnsemble e = sample_gaussian_ensemble(-3.0, 0.0, 0.01, 0.01, 2000, 14);
  const double dt = 0.1;
  const WindowArrival before = arrival_probability_window(e, 0.0, 1.0, dt, kUnits, &V);
  const WindowArrival during = arrival_probability_window(e, 0.0, std::numbers::pi / 2.0 - dt / 2.0, dt, kUnits, &V);
  EXPECT_EQ(before.pi_plus, 0.0);
  EXPECT_NEAR(during.pi_plus * dt, 1.0, 1e-9);
}
