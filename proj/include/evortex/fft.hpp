// fft.hpp - cached FFTW kernels for square power-of-two grids
#ifndef EVORTEX_FFT_HPP
#define EVORTEX_FFT_HPP

#include <complex>

namespace evortex::detail {

/// Unnormalized in-place 2D DFT on row-major n x n data. Plans are cached per
/// (n, direction) and created with FFTW_ESTIMATE, so results are reproducible
/// run to run; concurrent executes on distinct buffers are safe.
void fft2_inplace(std::complex<double>* data, int n, bool forward);

/// Unnormalized in-place 1D DFT of length n.
void fft1_inplace(std::complex<double>* data, int n, bool forward);

/// Quadrant swap moving index n/2 to index 0 (self-inverse for even n).
void fftshift_inplace(std::complex<double>* data, int n);

} // namespace evortex::detail

#endif
