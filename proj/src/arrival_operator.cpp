#include "weakarrival/arrival_operator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "weakarrival/errors.hpp"

namespace weakarrival {

void ArrivalConfig::validate() const {
  units.validate();
  if (!(std::isfinite(dt) && dt > 0.0)) throw DomainError("arrival: dt must be positive");
  if (!std::isfinite(X)) throw DomainError("arrival: X must be finite");
}

namespace {

constexpr double kNormTolerance = 1e-6;
constexpr double kSwitchThreshold = 1e-5;
constexpr double kSupportCutoff = 1e-10;

const Complex kSqrtI = std::polar(1.0, std::numbers::pi / 4.0);

/// a = sqrt(i dt / (2 hbar m))
Complex erfc_scale(const ArrivalConfig& cfg) {
  return kSqrtI * std::sqrt(cfg.dt / (2.0 * cfg.units.hbar * cfg.units.mass));
}

void check_momenta(double p1, double p2) {
  if (!std::isfinite(p1) || !std::isfinite(p2)) throw DomainError("arrival: non-finite momentum");
}

// Product of |p1 - p2| and the largest length scale entering the phases.
// Below kSwitchThreshold the difference quotient loses too many digits.
bool near_diagonal(double p1, double p2, const ArrivalConfig& cfg) {
  const double hbar = cfg.units.hbar, m = cfg.units.mass;
  const double pbar = 0.5 * (p1 + p2);
  const double length = std::max({std::abs(cfg.X), std::sqrt(hbar * cfg.dt / m),
                                  std::abs(pbar) * cfg.dt / m});
  return std::abs(p2 - p1) * length / hbar < kSwitchThreshold;
}

Complex closed_form(double p1, double p2, const ArrivalConfig& cfg) {
  const double hbar = cfg.units.hbar, m = cfg.units.mass, dt = cfg.dt;
  const Complex a = erfc_scale(cfg);
  const double d = p2 - p1;
  const Complex phase = std::polar(1.0, d * cfg.X / hbar);
  const Complex chirp = std::polar(1.0, dt * (p1 * p1 - p2 * p2) / (2.0 * hbar * m));
  const Complex bracket = chirp * erfc_complex(-p1 * a) - erfc_complex(-p2 * a);
  return Complex(0.0, hbar / (2.0 * dt * d)) * phase * bracket;
}

// Expansion of the bracket / (p2 - p1) about pbar to second order in d = p2 - p1.
// With f(p) = erfc(-p a) and exp(i dt (p1^2 - p2^2)/(2 hbar m)) = exp(A d), A = -i dt pbar/(hbar m).
Complex taylor_branch(double p1, double p2, const ArrivalConfig& cfg) {
  const double hbar = cfg.units.hbar, m = cfg.units.mass, dt = cfg.dt;
  const Complex a = erfc_scale(cfg);
  const double pbar = 0.5 * (p1 + p2);
  const double d = p2 - p1;
  const Complex a2 = a * a;
  const Complex f = erfc_complex(-pbar * a);
  const Complex g = 2.0 * a * std::numbers::inv_sqrtpi * std::exp(-a2 * pbar * pbar);
  const Complex f1 = g;
  const Complex f2 = g * (-2.0 * a2 * pbar);
  const Complex f3 = g * (4.0 * a2 * a2 * pbar * pbar - 2.0 * a2);
  const Complex A(0.0, -dt * pbar / (hbar * m));
  const Complex c1 = -f1 + A * f;
  const Complex c2 = -A * f1 / 2.0 + A * A * f / 2.0;
  const Complex c3 = -f3 / 24.0 + A * f2 / 8.0 - A * A * f1 / 4.0 + A * A * A * f / 6.0;
  const Complex phase = std::polar(1.0, d * cfg.X / hbar);
  return Complex(0.0, hbar / (2.0 * dt)) * phase * (c1 + c2 * d + c3 * d * d);
}

void check_normalized(const GridWavefunction& psi) {
  const double n = psi.norm();
  if (!(std::abs(n - 1.0) <= kNormTolerance))
    throw NormalizationError("arrival: wavefunction norm " + std::to_string(n) +
                             " differs from 1 by more than 1e-6");
}

// <P1 P2~(dt)> / dt
ComplexArrivalResult from_expectation(Complex value, double dt) {
  return {value.real() / dt, value.imag() / dt};
}

}  // namespace

Complex pi_plus_matrix_element(double p1, double p2, const ArrivalConfig& cfg) {
  cfg.validate();
  check_momenta(p1, p2);
  if (p1 == p2) return pi_plus_diagonal(p1, cfg);
  if (near_diagonal(p1, p2, cfg)) return taylor_branch(p1, p2, cfg);
  return closed_form(p1, p2, cfg);
}

Complex pi_plus_diagonal(double p, const ArrivalConfig& cfg) {
  cfg.validate();
  check_momenta(p, p);
  const double hbar = cfg.units.hbar, m = cfg.units.mass, dt = cfg.dt;
  const Complex current = (p / (2.0 * m)) * erfc_complex(-p * erfc_scale(cfg));
  const Complex spread = hbar / (kSqrtI * std::sqrt(2.0 * std::numbers::pi * hbar * m * dt)) *
                         std::polar(1.0, -p * p * dt / (2.0 * hbar * m));
  return current + spread;
}

Complex pi_plus_semiclassical(double p1, double p2, const ArrivalConfig& cfg) {
  cfg.validate();
  check_momenta(p1, p2);
  return (p1 + p2) / (2.0 * cfg.units.mass) * std::polar(1.0, (p2 - p1) * cfg.X / cfg.units.hbar);
}

Complex pi_minus_matrix_element(double p1, double p2, const ArrivalConfig& cfg) {
  ArrivalConfig mirrored = cfg;
  mirrored.X = -cfg.X;
  return pi_plus_matrix_element(-p1, -p2, mirrored);
}

// Writing <p1|Pi|p2> = s (i hbar / 2 dt) e^{i(p2-p1)X/hbar} (E_1 f(p1) - f(p2)) / (p2 - p1)
// with E_1 = e^{i kappa p1^2/2} e^{-i kappa p2^2/2}, kappa = dt/(hbar m), and
// f(p) = erfc(-s p a), the per-node factors are computed once so the double
// sum needs no special-function calls off the diagonal.
ComplexArrivalResult expectation_pi(const GridWavefunction& psi_in, const ArrivalConfig& cfg,
                                    ArrivalDirection direction) {
  cfg.validate();
  const GridWavefunction psi = psi_in.to_momentum();
  check_normalized(psi);
  const double hbar = cfg.units.hbar, m = cfg.units.mass, dt = cfg.dt;
  const double s = direction == ArrivalDirection::from_left ? 1.0 : -1.0;
  const Complex a = erfc_scale(cfg);
  const double kappa = dt / (hbar * m);

  const auto amp = psi.amplitudes();
  double peak = 0.0;
  for (const auto& c : amp) peak = std::max(peak, std::abs(c));
  std::vector<double> p;
  std::vector<Complex> u, v, front, back, f;
  for (std::size_t k = 0; k < amp.size(); ++k) {
    if (!(std::abs(amp[k]) > kSupportCutoff * peak)) continue;
    const double pk = psi.coordinate(k);
    const Complex plane = std::polar(1.0, pk * cfg.X / hbar);
    const Complex fk = erfc_complex(-s * pk * a);
    p.push_back(pk);
    u.push_back(std::conj(amp[k] * plane));
    v.push_back(amp[k] * plane);
    f.push_back(fk);
    front.push_back(std::polar(1.0, kappa * pk * pk / 2.0) * fk);
    back.push_back(std::polar(1.0, -kappa * pk * pk / 2.0));
  }

  const std::size_t n = p.size();
  const Complex prefactor(0.0, s * hbar / (2.0 * dt));
  Complex off_diagonal = 0.0, diagonal = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    // <p|Pi-|p> = <-p|Pi+|-p>; the diagonal does not depend on X.
    diagonal += std::norm(u[k]) * pi_plus_diagonal(s * p[k], cfg);
    Complex row = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == k) continue;
      if (near_diagonal(p[k], p[j], cfg)) {
        // Evaluate via the matrix-element routine; strip the plane-wave factors already in u, v.
        const Complex element = s > 0 ? pi_plus_matrix_element(p[k], p[j], cfg)
                                      : pi_minus_matrix_element(p[k], p[j], cfg);
        row += element / prefactor * std::polar(1.0, -(p[j] - p[k]) * cfg.X / hbar) * v[j];
        continue;
      }
      row += (front[k] * back[j] - f[j]) / (p[j] - p[k]) * v[j];
    }
    off_diagonal += u[k] * prefactor * row;
  }
  const double w = psi.measure();
  const Complex value = (off_diagonal + diagonal) * (w * w);
  return {value.real(), value.imag()};
}

ComplexArrivalResult expectation_pi_grid(const GridWavefunction& psi_in, const ArrivalConfig& cfg,
                                         const Dynamics& dynamics, ArrivalDirection direction) {
  cfg.validate();
  check_normalized(psi_in);
  const Side first = direction == ArrivalDirection::from_left ? Side::left : Side::right;
  const Side second = direction == ArrivalDirection::from_left ? Side::right : Side::left;
  const GridWavefunction psi = psi_in.to_position();
  const GridWavefunction projected_then_evolved =
      dynamics.evolve(project_region(psi, cfg.X, first), cfg.dt).to_position();
  const GridWavefunction evolved_then_projected =
      project_region(dynamics.evolve(psi, cfg.dt), cfg.X, second);
  return from_expectation(projected_then_evolved.inner_product(evolved_then_projected), cfg.dt);
}

double w12_predicted(const ComplexArrivalResult& pi, double detector_coefficient,
                     const ArrivalConfig& cfg) {
  cfg.validate();
  return pi.pi1 * cfg.dt - (2.0 * cfg.dt / cfg.units.hbar) * detector_coefficient * pi.pi2;
}

}  // namespace weakarrival
