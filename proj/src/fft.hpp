#pragma once

#include <span>

#include "weakarrival/specfun.hpp"

namespace weakarrival::detail {

// Unnormalized in-place DFTs (FFTW sign conventions). Plans are cached per
// size; execution is safe from several threads at once.
void fft_forward(std::span<Complex> data);
void fft_backward(std::span<Complex> data);

}  // namespace weakarrival::detail
