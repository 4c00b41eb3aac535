#pragma once

#include <complex>
#include <vector>

namespace gesturegan::detail {

// In-place iterative radix-2 FFT; size must be a power of two.
void fft(std::vector<std::complex<double>>& data);

// |X_k|^2 for k = 0..n/2 of a real signal zero-padded to n.
std::vector<double> power_spectrum(const std::vector<double>& frame, int n);

}  // namespace gesturegan::detail
