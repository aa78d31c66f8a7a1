#pragma once

// Thin FFTW wrapper with a per-shape plan cache. Plans use FFTW_ESTIMATE so
// results are reproducible across runs.

#include <complex>
#include <vector>

namespace semilab {

// In-place complex DFT over an n-d row-major array. sign = -1 forward
// (e^{-i k x} convention), +1 backward. The backward transform is NOT
// normalized; callers divide by the total size where needed.
void fft_inplace(std::complex<double>* data, const std::vector<int>& dims, int sign);

inline void fft_forward(std::vector<std::complex<double>>& v, const std::vector<int>& dims) {
    fft_inplace(v.data(), dims, -1);
}

inline void fft_backward(std::vector<std::complex<double>>& v, const std::vector<int>& dims) {
    fft_inplace(v.data(), dims, +1);
}

} // namespace semilab
