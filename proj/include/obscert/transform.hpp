#pragma once

#include "obscert/grid.hpp"

namespace obscert {

// Unnormalized in-place DFT (FFTW convention): sign = -1 forward, +1 backward.
// Backward does NOT divide by N^d; callers scale as needed. Plans are cached
// per (d, N) under a mutex; execution is thread-safe on distinct buffers.
void dft_inplace(Field& f, int sign);

// Round trip forward + backward + 1/N^d.
void fft_roundtrip_normalize(Field& f);

}  // namespace obscert
