#include "weakarrival/specfun.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "weakarrival/errors.hpp"

namespace weakarrival {
namespace {

constexpr double kInvSqrtPi = std::numbers::inv_sqrtpi;

// Region boundaries (in terms of z with Re z >= 0) where the Taylor series for
// erf keeps ~13 significant digits of erfc. Outside it the Laplace continued
// fraction for w(iz) converges to full precision with kConvergents terms.
constexpr double kSeriesMaxRe = 2.0;
constexpr double kSeriesMaxAbs = 6.0;
constexpr int kConvergents = 64;
constexpr double kMaxAbsArgument = 1e6;

void check_argument(Complex z) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
    throw DomainError("erfc/faddeeva: non-finite argument");
  if (std::abs(z) >= kMaxAbsArgument)
    throw DomainError("erfc/faddeeva: |z| exceeds 1e6");
}

Complex check_result(Complex v) {
  if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
    throw std::overflow_error("erfc/faddeeva: result not representable");
  return v;
}

bool in_series_region(Complex z) {
  return z.real() <= kSeriesMaxRe && std::abs(z) <= kSeriesMaxAbs;
}

// erfc(z) = 1 - (2/sqrt(pi)) sum_n (-1)^n z^(2n+1) / (n! (2n+1))
Complex erfc_series(Complex z) {
  const Complex z2 = z * z;
  Complex term = z;
  Complex sum = z;
  for (int n = 1; n < 1000; ++n) {
    term *= -z2 / static_cast<double>(n);
    const Complex contrib = term / static_cast<double>(2 * n + 1);
    sum += contrib;
    if (std::abs(contrib) <= 1e-17 * std::abs(sum)) break;
  }
  return 1.0 - 2.0 * kInvSqrtPi * sum;
}

// w(zeta) = (i/sqrt(pi)) / (zeta - (1/2)/(zeta - 1/(zeta - (3/2)/(zeta - ...)))),
// evaluated bottom-up. Valid for Im zeta >= 0 away from the series region.
Complex faddeeva_continued_fraction(Complex zeta) {
  Complex tail = 0.0;
  for (int k = kConvergents; k >= 1; --k) tail = (0.5 * k) / (zeta - tail);
  return Complex(0.0, kInvSqrtPi) / (zeta - tail);
}

// erfc for Re z >= 0.
Complex erfc_right_half(Complex z) {
  if (in_series_region(z)) return erfc_series(z);
  const Complex w = faddeeva_continued_fraction(Complex(-z.imag(), z.real()));
  const Complex minus_z2 = -z * z;
  if (std::abs(minus_z2.real()) < 700.0) return std::exp(minus_z2) * w;
  // exp(-z^2) alone would over/underflow; fold w into the exponent.
  return std::exp(minus_z2 + std::log(w));
}

// w for Im zeta >= 0.
Complex faddeeva_upper_half(Complex zeta) {
  const Complex z(zeta.imag(), -zeta.real());  // z = -i zeta, Re z = Im zeta >= 0
  if (in_series_region(z)) return std::exp(-zeta * zeta) * erfc_series(z);
  return faddeeva_continued_fraction(zeta);
}

}  // namespace

Complex erfc_complex(Complex z) {
  check_argument(z);
  if (z.real() < 0.0) return check_result(2.0 - erfc_right_half(-z));
  return check_result(erfc_right_half(z));
}

Complex faddeeva(Complex z) {
  check_argument(z);
  if (z.imag() < 0.0) return check_result(2.0 * std::exp(-z * z) - faddeeva_upper_half(-z));
  return check_result(faddeeva_upper_half(z));
}

}  // namespace weakarrival
