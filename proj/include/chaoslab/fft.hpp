#ifndef CHAOSLAB_FFT_HPP
#define CHAOSLAB_FFT_HPP

#include <complex>
#include <cstddef>
#include <vector>

namespace chaoslab {

// In-place complex DFT, FFTW-backed. Plans are cached per size and shared;
// execution is safe from multiple threads on distinct buffers.
// forward: X_k = sum_j x_j e^{-2 pi i jk/n};  inverse: unnormalized conjugate
// transform (divide by n to invert forward).
void fft_forward(std::vector<std::complex<double>>& data);
void fft_inverse(std::vector<std::complex<double>>& data);

// row-column 2-d transforms on row-major n0 x n1 data
void fft2_forward(std::vector<std::complex<double>>& data, std::size_t n0, std::size_t n1);
void fft2_inverse(std::vector<std::complex<double>>& data, std::size_t n0, std::size_t n1);

}  // namespace chaoslab

#endif
