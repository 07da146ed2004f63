#pragma once

#include <complex>

namespace weakarrival {

using Complex = std::complex<double>;

/// Complementary error function of a complex argument.
///
/// Relative error below 1e-10 for |z| <= 10. Throws DomainError for
/// non-finite input or |z| >= 1e6, and std::overflow_error when the result
/// itself is not representable as a finite double.
Complex erfc_complex(Complex z);

/// Faddeeva function w(z) = exp(-z^2) erfc(-iz).
Complex faddeeva(Complex z);

}  // namespace weakarrival
