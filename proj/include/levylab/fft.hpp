#pragma once

#include <complex>
#include <vector>

namespace levylab {

using cvector = std::vector<std::complex<double>>;

// Unnormalized complex DFT on a power-of-two lattice, d = 1 or 2
// (square n x n for d = 2).  forward uses the e^{-2*pi*i*j*k/n} sign,
// inverse the opposite sign; neither applies a 1/n factor.  Backed by
// FFTW with an internal plan cache; safe to call concurrently on
// distinct buffers.
void fft_forward(int dim, int n, const std::complex<double>* in, std::complex<double>* out);
void fft_inverse(int dim, int n, const std::complex<double>* in, std::complex<double>* out);

void fft_forward(int dim, int n, cvector& data);
void fft_inverse(int dim, int n, cvector& data);

} // namespace levylab
