#pragma once

#include <complex>
#include <vector>

#include "solitonlab/grid.hpp"

namespace slab::detail {

/// Forward/backward complex FFT on n points (FFTW behind a cached plan).
/// Forward is unnormalized, backward divides by n. Plan creation is
/// serialized; execution on caller-owned buffers is thread-safe.
void fft(int n, const cplx* in, cplx* out);
void ifft(int n, const cplx* in, cplx* out);

std::vector<cplx> fft(const std::vector<cplx>& in);
std::vector<cplx> ifft(const std::vector<cplx>& in);

/// real-to-halfcomplex transform (n/2+1 bins) and inverse
std::vector<cplx> rfft(const std::vector<double>& in);
std::vector<double> irfft(const std::vector<cplx>& in, int n);
void rfft(int n, const double* in, cplx* out);
void irfft(int n, const cplx* in, double* out);

}  // namespace slab::detail
